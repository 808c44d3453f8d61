//! # f-divergence generators
//!
//! Each generator is a convex, lower semi-continuous `f` with `f(1) = 0`,
//! together with its convex conjugate `f*(t) = sup_u (t·u − f(u))`.
//!
//! | Name | f(u) | f*(t) | dom f* | x₀ |
//! |------|------|-------|--------|----|
//! | KL | u log u | exp(t − 1) | ℝ | 1 |
//! | ReverseKL | −log u | −1 − log(−t) | t < 0 | −1 |
//! | TV | ½\|u − 1\| | t | [−½, ½] | 0 |
//! | JS | u log u − (u + 1) log((u + 1)/2) | −log(2 − eᵗ) | t < log 2 | 0 |
//! | SqHellinger | (√u − 1)² | t / (1 − t) | t < 1 | 0 |
//!
//! `x₀` is the fixed point `f*(x₀) = x₀`; every conjugate here also satisfies
//! `f*(t) ≥ t`, so `f*(v) − v` is a nonnegative residual that vanishes at
//! `v ≡ x₀`.
//!
//! The closed-form divergence `D_f(μ‖ν) = Σᵢ νᵢ f(μᵢ/νᵢ)` uses `0·f(0/0) = 0`
//! and charges `μᵢ · lim_{u→∞} f(u)/u` for atoms with `νᵢ = 0 < μᵢ`. With the
//! JS generator above, `D_f` equals `KL(μ‖m) + KL(ν‖m)` for `m = (μ + ν)/2`,
//! i.e. twice the usual Jensen–Shannon divergence, and is bounded by `log 4`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// `f64::INFINITY` for `+∞`.
    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(x) => x,
            Self::PosInfinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(x),
            Self::PosInfinity => None,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            Self::PosInfinity
        } else {
            Self::Finite(x)
        }
    }

    pub fn minus(self, c: f64) -> Self {
        match self {
            Self::Finite(x) => Self::Finite(x - c),
            Self::PosInfinity => Self::PosInfinity,
        }
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a.max(b)),
            _ => Self::PosInfinity,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::PosInfinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(x) => s.serialize_f64(*x),
            Self::PosInfinity => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Kl,
    ReverseKl,
    Tv,
    Js,
    SqHellinger,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [Self::Kl, Self::ReverseKl, Self::Tv, Self::Js, Self::SqHellinger];

    pub fn name(self) -> &'static str {
        match self {
            Self::Kl => "KL",
            Self::ReverseKl => "ReverseKL",
            Self::Tv => "TV",
            Self::Js => "JS",
            Self::SqHellinger => "SqHellinger",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "kl" => Ok(Self::Kl),
            "reversekl" | "rkl" => Ok(Self::ReverseKl),
            "tv" => Ok(Self::Tv),
            "js" => Ok(Self::Js),
            "sqhellinger" | "hellinger" => Ok(Self::SqHellinger),
            _ => Err(Error::UnknownGenerator(s.to_string())),
        }
    }
}

impl Serialize for GeneratorKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// An interval of the real line; `None` bounds are infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        let above = match self.lo {
            None => true,
            Some(lo) => t > lo || (self.lo_closed && t == lo),
        };
        let below = match self.hi {
            None => true,
            Some(hi) => t < hi || (self.hi_closed && t == hi),
        };
        t.is_finite() && above && below
    }

    pub fn contains_interior(&self, t: f64) -> bool {
        t.is_finite() && self.lo.is_none_or(|lo| t > lo) && self.hi.is_none_or(|hi| t < hi)
    }
}

/// A generator `f` with its conjugate and fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FGenerator {
    pub kind: GeneratorKind,
}

pub fn catalog(kind: GeneratorKind) -> FGenerator {
    FGenerator { kind }
}

/// Look a generator up by its CLI-facing name.
pub fn catalog_by_name(name: &str) -> Result<FGenerator> {
    name.parse().map(catalog)
}

const LN2: f64 = std::f64::consts::LN_2;

impl FGenerator {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// `f(u)`; `+∞` for `u < 0` and where `f` blows up.
    pub fn f(&self, u: f64) -> ExtendedReal {
        use ExtendedReal::*;
        if u < 0.0 || u.is_nan() {
            return PosInfinity;
        }
        match self.kind {
            GeneratorKind::Kl => Finite(xlogx(u)),
            GeneratorKind::ReverseKl => {
                if u == 0.0 {
                    PosInfinity
                } else {
                    Finite(-u.ln())
                }
            }
            GeneratorKind::Tv => Finite(0.5 * (u - 1.0).abs()),
            GeneratorKind::Js => Finite(xlogx(u) - (u + 1.0) * ((u + 1.0) / 2.0).ln()),
            GeneratorKind::SqHellinger => Finite((u.sqrt() - 1.0).powi(2)),
        }
    }

    /// `f*(t)`; `+∞` outside the effective domain.
    pub fn f_conj(&self, t: f64) -> ExtendedReal {
        use ExtendedReal::*;
        if !self.dom_conj().contains(t) {
            return PosInfinity;
        }
        Finite(match self.kind {
            GeneratorKind::Kl => (t - 1.0).exp(),
            GeneratorKind::ReverseKl => -1.0 - (-t).ln(),
            GeneratorKind::Tv => t,
            GeneratorKind::Js => -(2.0 - t.exp()).ln(),
            GeneratorKind::SqHellinger => t / (1.0 - t),
        })
    }

    /// `(f*)'(t)` on the interior of the domain.
    pub fn f_conj_deriv(&self, t: f64) -> f64 {
        match self.kind {
            GeneratorKind::Kl => (t - 1.0).exp(),
            GeneratorKind::ReverseKl => -1.0 / t,
            GeneratorKind::Tv => 1.0,
            GeneratorKind::Js => {
                let e = t.exp();
                e / (2.0 - e)
            }
            GeneratorKind::SqHellinger => 1.0 / ((1.0 - t) * (1.0 - t)),
        }
    }

    /// `(f*)''(t)` on the interior of the domain.
    pub fn f_conj_second(&self, t: f64) -> f64 {
        match self.kind {
            GeneratorKind::Kl => (t - 1.0).exp(),
            GeneratorKind::ReverseKl => 1.0 / (t * t),
            GeneratorKind::Tv => 0.0,
            GeneratorKind::Js => {
                let e = t.exp();
                2.0 * e / ((2.0 - e) * (2.0 - e))
            }
            GeneratorKind::SqHellinger => 2.0 / (1.0 - t).powi(3),
        }
    }

    pub fn dom_conj(&self) -> Interval {
        let open_above = |hi| Interval { lo: None, hi: Some(hi), lo_closed: false, hi_closed: false };
        match self.kind {
            GeneratorKind::Kl => Interval { lo: None, hi: None, lo_closed: false, hi_closed: false },
            GeneratorKind::ReverseKl => open_above(0.0),
            GeneratorKind::Tv => Interval { lo: Some(-0.5), hi: Some(0.5), lo_closed: true, hi_closed: true },
            GeneratorKind::Js => open_above(LN2),
            GeneratorKind::SqHellinger => open_above(1.0),
        }
    }

    /// The fixed point `f*(x₀) = x₀` in the interior of `dom f*`.
    pub fn x0(&self) -> f64 {
        match self.kind {
            GeneratorKind::Kl => 1.0,
            GeneratorKind::ReverseKl => -1.0,
            _ => 0.0,
        }
    }

    /// `lim_{u→∞} f(u)/u`, charged to atoms of `μ` outside the support of `ν`.
    pub fn recession(&self) -> ExtendedReal {
        use ExtendedReal::*;
        match self.kind {
            GeneratorKind::Kl => PosInfinity,
            GeneratorKind::ReverseKl => Finite(0.0),
            GeneratorKind::Tv => Finite(0.5),
            GeneratorKind::Js => Finite(LN2),
            GeneratorKind::SqHellinger => Finite(1.0),
        }
    }
}

fn xlogx(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.ln()
    }
}

/// `D_f(μ‖ν) = Σᵢ νᵢ f(μᵢ/νᵢ)` with the zero-mass conventions above.
pub fn closed_form_fdiv(g: &FGenerator, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<ExtendedReal> {
    if !mu.same_space(nu) {
        return Err(Error::SpaceMismatch);
    }
    let mut total = 0.0;
    for (&p, &q) in mu.weights().iter().zip(nu.weights()) {
        let term = if q > 0.0 {
            match g.kind {
                // Written out to avoid forming tiny ratios.
                GeneratorKind::Kl if p > 0.0 => ExtendedReal::Finite(p * (p / q).ln()),
                GeneratorKind::ReverseKl if p > 0.0 => ExtendedReal::Finite(q * (q / p).ln()),
                GeneratorKind::Tv => ExtendedReal::Finite(0.5 * (p - q).abs()),
                GeneratorKind::SqHellinger => ExtendedReal::Finite((p.sqrt() - q.sqrt()).powi(2)),
                GeneratorKind::Js => {
                    let m = p + q;
                    ExtendedReal::Finite(xlogx(p) + xlogx(q) - m * (m / 2.0).ln())
                }
                _ => match g.f(p / q) {
                    ExtendedReal::Finite(v) => ExtendedReal::Finite(q * v),
                    inf => inf,
                },
            }
        } else if p > 0.0 {
            match g.recession() {
                ExtendedReal::Finite(r) => ExtendedReal::Finite(p * r),
                inf => inf,
            }
        } else {
            ExtendedReal::Finite(0.0)
        };
        match term {
            ExtendedReal::Finite(v) => total += v,
            ExtendedReal::PosInfinity => return Ok(ExtendedReal::PosInfinity),
        }
    }
    // Round-off can push an exact zero slightly negative.
    Ok(ExtendedReal::Finite(total.max(0.0)))
}
