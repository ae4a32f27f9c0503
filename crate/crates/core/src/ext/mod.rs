//! The three language extensions: parameter-specific fixpoints, iterators
//! and arrays. Each is switched on per program through [`Extensions`].

pub mod arrays;
pub mod iter;
pub mod paramfix;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Extensions {
    pub param_fix: bool,
    pub iter: bool,
    pub arrays: bool,
}

impl Extensions {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        Self { param_fix: true, iter: true, arrays: true }
    }
}

impl FromStr for Extensions {
    type Err = String;

    /// Parses a comma-separated list such as `param-fix,arrays`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut ext = Self::none();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "param-fix" => ext.param_fix = true,
                "iter" => ext.iter = true,
                "arrays" => ext.arrays = true,
                other => return Err(format!("unknown extension `{other}` (expected param-fix, iter or arrays)")),
            }
        }
        Ok(ext)
    }
}

impl fmt::Display for Extensions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.param_fix {
            names.push("param-fix");
        }
        if self.iter {
            names.push("iter");
        }
        if self.arrays {
            names.push("arrays");
        }
        f.write_str(&names.join(","))
    }
}
