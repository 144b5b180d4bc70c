use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use arrayvec::ArrayVec;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use libm::{erf, erfc};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    Real,
    Complex,
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Self::Real),
            "complex" => Ok(Self::Complex),
            other => Err(Error::UnknownName {
                what: "symmetry class",
                value: other.to_string(),
            }),
        }
    }
}

/// Parametric family of a single entry, before scaling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawFamily {
    Gaussian,
    Rademacher,
    /// Mean-zero two-point law taking its positive value with probability `p`.
    TwoPoint { p: f64 },
    Zero,
    /// `scale * x` with `x` of density `1/|x|^3` on `|x| > 1`.
    HeavyTailCubic,
}

impl LawFamily {
    pub fn has_finite_variance(&self) -> bool {
        !matches!(self, Self::HeavyTailCubic)
    }

    /// The law of `scale * x` for `x` drawn from this family.
    ///
    /// Finite-variance families are normalized so that `scale^2` is the
    /// second moment.
    pub fn law(&self, scale: f64, class: SymmetryClass) -> EntryLaw {
        match *self {
            Self::Gaussian => EntryLaw::gaussian(scale, class),
            Self::Rademacher => EntryLaw::two_point(0.5, scale, class),
            Self::TwoPoint { p } => EntryLaw::two_point(p, scale, class),
            Self::Zero => EntryLaw::zero(),
            Self::HeavyTailCubic => EntryLaw::heavy_tail(scale, class),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::TwoPoint { p } if !(p > 0.0 && p < 1.0) => Err(Error::InvalidParameter(
                format!("two-point probability {p} outside (0, 1)"),
            )),
            _ => Ok(()),
        }
    }
}

impl FromStr for LawFamily {
    type Err = Error;

    /// `gaussian`, `rademacher`, `zero`, `heavy-tail`, or `two-point:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let family = match s {
            "gaussian" => Self::Gaussian,
            "rademacher" => Self::Rademacher,
            "zero" => Self::Zero,
            "heavy-tail" | "heavy-tail-cubic" => Self::HeavyTailCubic,
            other => match other.strip_prefix("two-point:") {
                Some(p) => Self::TwoPoint {
                    p: p.parse().map_err(|_| {
                        Error::InvalidParameter(format!("two-point probability `{p}`"))
                    })?,
                },
                None => {
                    return Err(Error::UnknownName {
                        what: "law family",
                        value: other.to_string(),
                    })
                }
            },
        };
        family.validate()?;
        Ok(family)
    }
}

impl fmt::Display for LawFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian => f.write_str("gaussian"),
            Self::Rademacher => f.write_str("rademacher"),
            Self::TwoPoint { p } => write!(f, "two-point:{p}"),
            Self::Zero => f.write_str("zero"),
            Self::HeavyTailCubic => f.write_str("heavy-tail"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub value: Complex64,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Gaussian { sd: f64 },
    HeavyTail { scale: f64 },
    Discrete(ArrayVec<Atom, 4>),
}

/// Distribution of one matrix entry with closed-form truncated moments.
///
/// Gaussian and heavy-tail laws may carry a truncation radius: the entry is
/// replaced by zero when its modulus exceeds it. Both are symmetric, so the
/// truncated law needs no centering shift. Discrete laws are truncated and
/// centered atom by atom.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryLaw {
    shape: Shape,
    class: SymmetryClass,
    radius: Option<f64>,
}

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

impl EntryLaw {
    pub fn zero() -> Self {
        let mut atoms = ArrayVec::new();
        atoms.push(Atom {
            value: Complex64::new(0.0, 0.0),
            prob: 1.0,
        });
        Self {
            shape: Shape::Discrete(atoms),
            class: SymmetryClass::Real,
            radius: None,
        }
    }

    /// Centered normal with `E|w|^2 = sd^2`; complex laws split it evenly
    /// between independent real and imaginary parts.
    pub fn gaussian(sd: f64, class: SymmetryClass) -> Self {
        if sd == 0.0 {
            return Self::zero();
        }
        Self {
            shape: Shape::Gaussian { sd },
            class,
            radius: None,
        }
    }

    /// Mean-zero two-point law with second moment `scale^2`.
    ///
    /// The complex version has independent real and imaginary parts, each a
    /// copy of the real law at scale `scale / sqrt(2)`.
    pub fn two_point(p: f64, scale: f64, class: SymmetryClass) -> Self {
        if scale == 0.0 {
            return Self::zero();
        }
        let hi = scale * ((1.0 - p) / p).sqrt();
        let lo = -scale * (p / (1.0 - p)).sqrt();
        let real = [(hi, p), (lo, 1.0 - p)];
        let atoms = match class {
            SymmetryClass::Real => real
                .iter()
                .map(|&(v, q)| Atom {
                    value: Complex64::new(v, 0.0),
                    prob: q,
                })
                .collect(),
            SymmetryClass::Complex => {
                let mut atoms = ArrayVec::new();
                for &(re, pr) in &real {
                    for &(im, pi) in &real {
                        atoms.push(Atom {
                            value: Complex64::new(re, im) * FRAC_1_SQRT_2,
                            prob: pr * pi,
                        });
                    }
                }
                atoms
            }
        };
        Self {
            shape: Shape::Discrete(atoms),
            class,
            radius: None,
        }
        .coalesced()
    }

    /// `scale * x`, `x` with density `1/|x|^3` on `|x| > 1`. The complex
    /// version has the same modulus and a uniform independent phase.
    pub fn heavy_tail(scale: f64, class: SymmetryClass) -> Self {
        if scale == 0.0 {
            return Self::zero();
        }
        Self {
            shape: Shape::HeavyTail { scale },
            class,
            radius: None,
        }
    }

    /// A finite law on the real line from `(value, probability)` pairs.
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() || atoms.len() > 4 {
            return Err(Error::InvalidParameter(
                "discrete law needs between 1 and 4 atoms".into(),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.iter().any(|a| a.1 < 0.0 || !a.0.is_finite()) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "discrete law probabilities must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self {
            shape: Shape::Discrete(
                atoms
                    .iter()
                    .map(|&(v, p)| Atom {
                        value: Complex64::new(v, 0.0),
                        prob: p,
                    })
                    .collect(),
            ),
            class: SymmetryClass::Real,
            radius: None,
        }
        .coalesced())
    }

    fn coalesced(mut self) -> Self {
        if let Shape::Discrete(atoms) = &mut self.shape {
            let mut merged: ArrayVec<Atom, 4> = ArrayVec::new();
            for a in atoms.iter() {
                if a.prob == 0.0 {
                    continue;
                }
                match merged.iter_mut().find(|m| m.value == a.value) {
                    Some(m) => m.prob += a.prob,
                    None => merged.push(*a),
                }
            }
            *atoms = merged;
            if atoms.iter().all(|a| a.value.im == 0.0) {
                self.class = SymmetryClass::Real;
            }
        }
        self
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn is_real(&self) -> bool {
        self.class == SymmetryClass::Real
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.shape, Shape::Discrete(a) if a.iter().all(|a| a.value == Complex64::new(0.0, 0.0)))
    }

    /// Atoms of a discrete law.
    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.shape {
            Shape::Discrete(a) => Some(a),
            _ => None,
        }
    }

    /// Truncation radius carried by a continuous law.
    pub fn radius(&self) -> Option<f64> {
        self.radius
    }

    /// `sup |w|` when the law is bounded.
    pub fn bound(&self) -> Option<f64> {
        match &self.shape {
            Shape::Discrete(a) => Some(a.iter().map(|a| a.value.norm()).fold(0.0, f64::max)),
            _ => self.radius,
        }
    }

    pub fn has_finite_variance(&self) -> bool {
        self.second_moment().is_finite()
    }

    // Closed forms for the untruncated continuous shapes.

    fn base_tail_probability(&self, a: f64) -> f64 {
        match self.shape {
            Shape::Gaussian { sd } => match self.class {
                SymmetryClass::Real => erfc(a / sd / SQRT_2),
                SymmetryClass::Complex => (-(a / sd).powi(2)).exp(),
            },
            Shape::HeavyTail { scale } => {
                if a < scale {
                    1.0
                } else {
                    (scale / a).powi(2)
                }
            }
            Shape::Discrete(_) => unreachable!(),
        }
    }

    fn base_truncated_second_moment(&self, a: f64) -> f64 {
        match self.shape {
            Shape::Gaussian { sd } => {
                let x = a / sd;
                match self.class {
                    SymmetryClass::Real => sd * sd * (erf(x / SQRT_2) - 2.0 * x * phi(x)),
                    SymmetryClass::Complex => {
                        let r = x * x;
                        sd * sd * (-(-r).exp_m1() - r * (-r).exp())
                    }
                }
            }
            Shape::HeavyTail { scale } => {
                if a < scale {
                    0.0
                } else {
                    2.0 * scale * scale * (a / scale).ln()
                }
            }
            Shape::Discrete(_) => unreachable!(),
        }
    }

    fn base_tail_second_moment(&self, a: f64) -> f64 {
        match self.shape {
            Shape::Gaussian { sd } => {
                let x = a / sd;
                match self.class {
                    SymmetryClass::Real => sd * sd * (erfc(x / SQRT_2) + 2.0 * x * phi(x)),
                    SymmetryClass::Complex => {
                        let r = x * x;
                        sd * sd * (-r).exp() * (1.0 + r)
                    }
                }
            }
            Shape::HeavyTail { .. } => f64::INFINITY,
            Shape::Discrete(_) => unreachable!(),
        }
    }

    /// `P(|w| > a)`.
    pub fn tail_probability(&self, a: f64) -> f64 {
        match &self.shape {
            Shape::Discrete(atoms) => atoms
                .iter()
                .filter(|at| at.value.norm() > a)
                .map(|at| at.prob)
                .sum(),
            _ => match self.radius {
                None => self.base_tail_probability(a),
                Some(r) if a < r => {
                    (self.base_tail_probability(a) - self.base_tail_probability(r)).max(0.0)
                }
                Some(_) => 0.0,
            },
        }
    }

    /// `E[|w|^2; |w| <= a]`.
    pub fn truncated_second_moment(&self, a: f64) -> f64 {
        match &self.shape {
            Shape::Discrete(atoms) => atoms
                .iter()
                .filter(|at| at.value.norm() <= a)
                .map(|at| at.prob * at.value.norm_sqr())
                .sum(),
            _ => {
                let a = self.radius.map_or(a, |r| a.min(r));
                self.base_truncated_second_moment(a)
            }
        }
    }

    /// `E[|w|^2; |w| > a]`.
    pub fn tail_second_moment(&self, a: f64) -> f64 {
        match &self.shape {
            Shape::Discrete(atoms) => atoms
                .iter()
                .filter(|at| at.value.norm() > a)
                .map(|at| at.prob * at.value.norm_sqr())
                .sum(),
            _ => match self.radius {
                None => self.base_tail_second_moment(a),
                Some(r) if a < r => match self.shape {
                    Shape::Gaussian { .. } => {
                        (self.base_tail_second_moment(a) - self.base_tail_second_moment(r)).max(0.0)
                    }
                    _ => (self.base_truncated_second_moment(r)
                        - self.base_truncated_second_moment(a))
                    .max(0.0),
                },
                Some(_) => 0.0,
            },
        }
    }

    /// `E|w|^2`, infinite for the untruncated heavy tail.
    pub fn second_moment(&self) -> f64 {
        match &self.shape {
            Shape::Discrete(atoms) => atoms.iter().map(|a| a.prob * a.value.norm_sqr()).sum(),
            Shape::Gaussian { sd } => match self.radius {
                None => sd * sd,
                Some(r) => self.base_truncated_second_moment(r),
            },
            Shape::HeavyTail { .. } => match self.radius {
                None => f64::INFINITY,
                Some(r) => self.base_truncated_second_moment(r),
            },
        }
    }

    /// `E[w; |w| <= a]`; zero for symmetric laws.
    pub fn truncated_mean(&self, a: f64) -> Complex64 {
        match &self.shape {
            Shape::Discrete(atoms) => atoms
                .iter()
                .filter(|at| at.value.norm() <= a)
                .map(|at| at.value * at.prob)
                .sum(),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.truncated_mean(f64::INFINITY)
    }

    /// `E[w^m]` for a real discrete law.
    pub fn raw_moment(&self, m: u32) -> Result<f64> {
        match (&self.shape, self.class) {
            (Shape::Discrete(atoms), SymmetryClass::Real) => Ok(atoms
                .iter()
                .map(|a| a.prob * a.value.re.powi(m as i32))
                .sum()),
            _ => Err(Error::UnsupportedLaw("exact moments")),
        }
    }

    /// Law of `w 1{|w| <= eta} - E[w; |w| <= eta]`.
    ///
    /// The result has mean zero and modulus at most `2 eta`.
    pub fn truncate_center(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "truncation level {eta} must be positive and finite"
            )));
        }
        match &self.shape {
            Shape::Discrete(atoms) => {
                let shift = self.truncated_mean(eta);
                let shifted = atoms
                    .iter()
                    .map(|a| {
                        let kept = if a.value.norm() <= eta {
                            a.value
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        Atom {
                            value: kept - shift,
                            prob: a.prob,
                        }
                    })
                    .collect();
                Ok(Self {
                    shape: Shape::Discrete(shifted),
                    class: self.class,
                    radius: None,
                }
                .coalesced())
            }
            _ => Ok(Self {
                radius: Some(self.radius.map_or(eta, |r| r.min(eta))),
                ..self.clone()
            }),
        }
    }

    /// Draws one value. Real laws return a zero imaginary part.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let w = match &self.shape {
            Shape::Gaussian { sd } => match self.class {
                SymmetryClass::Real => {
                    Complex64::new(sd * rng.sample::<f64, _>(StandardNormal), 0.0)
                }
                SymmetryClass::Complex => {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im) * (sd * FRAC_1_SQRT_2)
                }
            },
            Shape::HeavyTail { scale } => {
                let u: f64 = rng.random();
                let modulus = scale / (1.0 - u).sqrt();
                match self.class {
                    SymmetryClass::Real => {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        Complex64::new(sign * modulus, 0.0)
                    }
                    SymmetryClass::Complex => {
                        let theta = 2.0 * PI * rng.random::<f64>();
                        Complex64::from_polar(modulus, theta)
                    }
                }
            }
            Shape::Discrete(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = atoms[atoms.len() - 1].value;
                for a in atoms.iter() {
                    acc += a.prob;
                    if u < acc {
                        chosen = a.value;
                        break;
                    }
                }
                chosen
            }
        };
        match self.radius {
            Some(r) if w.norm() > r => Complex64::new(0.0, 0.0),
            _ => w,
        }
    }
}
