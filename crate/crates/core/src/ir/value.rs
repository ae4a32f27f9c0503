use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Opaque identity of a struct or array instance.
///
/// Null-labels occupy a reserved low range: struct `k` of the program owns
/// `Label(k)`, and the null array (arrays extension) owns the label right
/// after the last struct. Everything else is handed out by the engine's
/// allocator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A runtime value. `Nat` and `Int` share one 64-bit carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    Label(Label),
}

impl Value {
    pub fn as_label(&self) -> Option<Label> {
        match self {
            Value::Label(l) => Some(*l),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Renders the value, naming labels through `label_name`.
    pub fn render(&self, label_name: &dyn Fn(Label) -> String) -> String {
        match self {
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => format!("{s:?}"),
            Value::Label(l) => label_name(*l),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|l| l.to_string()))
    }
}
