use std::path::PathBuf;

use ladmm::{DiagLevel, GapMode};
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

/// How the step parameters are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamChoice {
    /// The smallest certified parameters for the instance.
    Derived,
    /// User-chosen parameters; validated and reported, but used as given.
    Manual { beta: f64, l_x: f64, l_y: f64 },
}

fn check_common(epsilon: f64, max_iters: usize, params: &ParamChoice) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(ExpError::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    if max_iters == 0 {
        return Err(ExpError::Config("max_iters must be at least 1".into()));
    }
    if let ParamChoice::Manual { beta, l_x, l_y } = *params {
        for (name, v) in [("beta", beta), ("L_x", l_x), ("L_y", l_y)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ExpError::Config(format!("{name} must be positive, got {v}")));
            }
        }
    }
    Ok(())
}

/// The nonconvex-penalty LASSO experiment
/// `min λ Σ F(x_j) + ‖y − b‖²  s.t.  Ax − y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoConfig {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub eta: f64,
    pub seed: u64,
    /// Number of equal x-blocks; must divide `n`.
    pub blocks: usize,
    pub params: ParamChoice,
    pub epsilon: f64,
    pub mode: GapMode,
    pub max_iters: usize,
    pub diag: DiagLevel,
    pub out: Option<PathBuf>,
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            n: 1024,
            m: 256,
            lambda: 0.1,
            eta: 0.1,
            seed: 0,
            blocks: 1,
            params: ParamChoice::Derived,
            epsilon: 1e-4,
            mode: GapMode::ExperimentGap,
            max_iters: 1_000_000,
            diag: DiagLevel::Off,
            out: None,
        }
    }
}

impl LassoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(ExpError::Config("N and M must be positive".into()));
        }
        if self.blocks == 0 || self.n % self.blocks != 0 {
            return Err(ExpError::Config(format!(
                "block count {} does not divide N = {}",
                self.blocks, self.n
            )));
        }
        for (name, v) in [("lambda", self.lambda), ("eta", self.eta)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ExpError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        check_common(self.epsilon, self.max_iters, &self.params)
    }
}

/// `f(t) = a t² + b t + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticTarget {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticTarget {
    /// `curvature · (t − center)²`.
    pub fn centered(curvature: f64, center: f64) -> Self {
        QuadraticTarget {
            a: curvature,
            b: -2.0 * curvature * center,
            c: curvature * center * center,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.a * t + self.b) * t + self.c
    }

    fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }
}

/// The integer-programming toy: minimize `f(t)` over a finite integer set,
/// rewritten as `τ(x) + (f(x) − h(x)) + h(y)` with `x = y` and
/// `h(t) = (μ/2) t²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntProgConfig {
    pub lo: i64,
    pub hi: i64,
    /// `None` draws a centered target with curvature 1 from `seed`.
    pub target: Option<QuadraticTarget>,
    pub mu: f64,
    pub seed: u64,
    pub params: ParamChoice,
    pub epsilon: f64,
    pub mode: GapMode,
    pub max_iters: usize,
    pub diag: DiagLevel,
    pub out: Option<PathBuf>,
}

impl Default for IntProgConfig {
    fn default() -> Self {
        IntProgConfig {
            lo: 0,
            hi: 5,
            target: None,
            mu: 1.0,
            seed: 0,
            params: ParamChoice::Derived,
            epsilon: 1e-8,
            mode: GapMode::ExperimentGap,
            max_iters: 1_000_000,
            diag: DiagLevel::Off,
            out: None,
        }
    }
}

impl IntProgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lo > self.hi {
            return Err(ExpError::Config(format!(
                "empty integer range {}..{}",
                self.lo, self.hi
            )));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(ExpError::Config(format!("mu must be positive, got {}", self.mu)));
        }
        if let Some(t) = &self.target {
            if !t.is_finite() {
                return Err(ExpError::Config("target coefficients must be finite".into()));
            }
        }
        check_common(self.epsilon, self.max_iters, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_validation() {
        assert!(LassoConfig::default().validate().is_ok());
        let bad = LassoConfig {
            blocks: 3,
            ..LassoConfig::default()
        };
        assert!(matches!(bad.validate(), Err(ExpError::Config(_))));
        let bad = LassoConfig {
            epsilon: 0.0,
            ..LassoConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LassoConfig {
            params: ParamChoice::Manual {
                beta: -1.0,
                l_x: 1.0,
                l_y: 1.0,
            },
            ..LassoConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn intprog_validation() {
        assert!(IntProgConfig::default().validate().is_ok());
        let bad = IntProgConfig {
            mu: 0.0,
            ..IntProgConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = IntProgConfig {
            lo: 3,
            hi: 2,
            ..IntProgConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn centered_target() {
        let t = QuadraticTarget::centered(2.0, 1.5);
        assert_eq!(t.value(1.5), 0.0);
        assert_eq!(t.value(2.5), 2.0);
    }
}
