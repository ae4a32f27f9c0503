//! Abstract syntax of AuDaLa programs.
//!
//! The parser produces this tree with every resolution slot left empty. The
//! well-formedness checker fills in the slots (parameter/local positions,
//! the types of `null` and `array(..)` expressions) and rewrites `X.s` on
//! arrays into [`Expr::ArraySize`], so lowering never has to consult a symbol
//! table.

use std::fmt;

use serde::Serialize;

/// A source position, 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// An identifier occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

impl Name {
    pub fn new(text: impl Into<String>, pos: Pos) -> Self {
        Self { text: text.into(), pos }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SynType {
    Nat,
    Int,
    Bool,
    String,
    Struct(String),
    Array(Box<SynType>),
}

impl SynType {
    pub fn is_numeric(&self) -> bool {
        matches!(self, SynType::Nat | SynType::Int)
    }

    /// Whether a value of type `self` may be stored where `target` is expected.
    /// `Nat` is a subset of `Int`.
    pub fn assignable_to(&self, target: &SynType) -> bool {
        self == target || (*self == SynType::Nat && *target == SynType::Int)
    }

    pub fn uses_arrays(&self) -> bool {
        matches!(self, SynType::Array(_))
    }
}

impl fmt::Display for SynType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynType::Nat => f.write_str("Nat"),
            SynType::Int => f.write_str("Int"),
            SynType::Bool => f.write_str("Bool"),
            SynType::String => f.write_str("String"),
            SynType::Struct(name) => f.write_str(name),
            SynType::Array(elem) => write!(f, "Array({elem})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Int(i64),
    Bool(bool),
    Str(String),
}

/// A variable reference `x.y[i].z`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarChain {
    pub head: Name,
    /// Environment slot of `head` in the executing instance; set by the checker.
    pub head_slot: Option<u16>,
    pub segments: Vec<Segment>,
}

impl VarChain {
    pub fn simple(head: Name) -> Self {
        Self { head, head_slot: None, segments: Vec::new() }
    }

    pub fn pos(&self) -> Pos {
        self.head.pos
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// `.name`; `slot` is the parameter position in the struct reached so far.
    Field { name: Name, slot: Option<u16> },
    /// `[expr]`, arrays extension only.
    Index(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Literal, Pos),
    This(Pos),
    /// `null`; `ty` is filled in by the checker from context.
    Null {
        ty: Option<SynType>,
        pos: Pos,
    },
    Var(VarChain),
    Not(Box<Expr>, Pos),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        pos: Pos,
    },
    Construct {
        ty: Name,
        args: Vec<Expr>,
    },
    /// `array(size)`; `elem` is filled in by the checker from context.
    ArrayNew {
        size: Box<Expr>,
        elem: Option<SynType>,
        pos: Pos,
    },
    /// `X.s` where `X` denotes an array. Only produced by the checker.
    ArraySize(VarChain),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Lit(_, pos)
            | Expr::This(pos)
            | Expr::Null { pos, .. }
            | Expr::Not(_, pos)
            | Expr::Binary { pos, .. }
            | Expr::ArrayNew { pos, .. } => *pos,
            Expr::Var(chain) | Expr::ArraySize(chain) => chain.pos(),
            Expr::Construct { ty, .. } => ty.pos,
        }
    }
}

/// `if (c1) then {..} else if (c2) then {..} else {..}`.
///
/// Core syntax has exactly one branch and no `otherwise`; longer chains are
/// sugar removed by [`crate::syntax::desugar`].
#[derive(Debug, Clone, PartialEq)]
pub struct IfStmt {
    pub branches: Vec<(Expr, Vec<Stmt>)>,
    pub otherwise: Option<Vec<Stmt>>,
    pub pos: Pos,
}

impl IfStmt {
    pub fn is_core(&self) -> bool {
        self.branches.len() == 1 && self.otherwise.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    If(IfStmt),
    /// `T x := E;`
    VarDecl {
        ty: SynType,
        name: Name,
        value: Expr,
        slot: Option<u16>,
    },
    /// `X := E;`
    Update {
        target: VarChain,
        value: Expr,
    },
    /// `T(E1, ..., En);`
    Construct {
        ty: Name,
        args: Vec<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: Name,
    pub ty: SynType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDef {
    pub name: Name,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructDef {
    pub name: Name,
    pub params: Vec<Param>,
    pub steps: Vec<StepDef>,
}

impl StructDef {
    pub fn step(&self, name: &str) -> Option<&StepDef> {
        self.steps.iter().find(|s| s.name.text == name)
    }

    pub fn param(&self, name: &str) -> Option<(usize, &Param)> {
        self.params.iter().enumerate().find(|(_, p)| p.name.text == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleItem {
    /// `F`
    GlobalCall(Name),
    /// `T.F`
    LocalCall { ty: Name, step: Name },
    /// `Fix(sc)`
    Fix(Schedule),
    /// `Fix(sc, p1, ..., pn)`, parameter-specific fixpoint.
    FixOn(Schedule, Vec<Name>),
    /// `Iter(s1; ...; sn)`
    Iter(Vec<Name>),
}

/// Schedule items separated by barriers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub items: Vec<ScheduleItem>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub structs: Vec<StructDef>,
    pub schedule: Schedule,
}

impl Program {
    pub fn struct_def(&self, name: &str) -> Option<&StructDef> {
        self.structs.iter().find(|s| s.name.text == name)
    }
}
