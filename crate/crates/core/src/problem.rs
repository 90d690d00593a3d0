//! The validated problem: time scale, frozen argument, potential and
//! boundary coefficients.


use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::timescale::{Domain, TimeScale};

/// Real potential `q(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Constant(f64),
    /// Ascending coefficients of a polynomial in `t`.
    Polynomial(Vec<f64>),
    /// Exact `(t, q(t))` pairs, looked up by equality. Finite scales only.
    Table(Vec<(f64, f64)>),
    /// Linear interpolation on a sorted grid.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl Potential {
    pub fn value(&self, t: f64) -> Option<f64> {
        match self {
            Potential::Constant(c) => Some(*c),
            Potential::Polynomial(c) => Some(c.iter().rev().fold(0.0, |acc, &x| acc * t + x)),
            Potential::Table(pairs) => pairs.iter().find(|p| p.0 == t).map(|p| p.1),
            Potential::Sampled { grid, values } => {
                let (first, last) = (*grid.first()?, *grid.last()?);
                if t < first || t > last {
                    return None;
                }
                let i = grid.partition_point(|&g| g <= t);
                if i == 0 {
                    return values.first().copied();
                }
                if i >= grid.len() {
                    return values.last().copied();
                }
                let (x0, x1) = (grid[i - 1], grid[i]);
                let w = (t - x0) / (x1 - x0);
                Some(values[i - 1] * (1.0 - w) + values[i] * w)
            }
        }
    }

    /// Points in `(lo, hi)` where the potential is not smooth.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        match self {
            Potential::Sampled { grid, .. } => {
                grid.iter().copied().filter(|&g| lo < g && g < hi).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            Potential::Constant(c) => Some(*c),
            Potential::Polynomial(c) if c.iter().skip(1).all(|&x| x == 0.0) => {
                Some(c.first().copied().unwrap_or(0.0))
            }
            _ => None,
        }
    }
}

/// Coefficients of the two boundary forms
/// `U(y) = a11 y(α) + a12 y^Δ(α) + a21 y(β) + a22 y^Δ(β)` and `V` likewise
/// with `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCoefficients {
    /// `[a11, a12, a21, a22]`
    pub a: [f64; 4],
    /// `[b11, b12, b21, b22]`
    pub b: [f64; 4],
}

impl BoundaryCoefficients {
    pub fn new(a: [f64; 4], b: [f64; 4]) -> Self {
        BoundaryCoefficients { a, b }
    }

    /// Apply one form to boundary data `(y(α), y^Δ(α), y(β), y^Δ(β))`.
    pub fn apply<T: Scalar>(row: &[f64; 4], data: [&T; 4]) -> T {
        row.iter()
            .zip(data)
            .filter(|(c, _)| **c != 0.0)
            .fold(T::zero(), |acc, (c, v)| acc + T::from_f64(*c) * v.clone())
    }

    /// `det [[a11 μ(α) - a12, b11 μ(α) - b12], [a22, b22]]`.
    pub fn det_a(&self, mu_alpha: f64) -> f64 {
        let [a11, a12, _, a22] = self.a;
        let [b11, b12, _, b22] = self.b;
        (a11 * mu_alpha - a12) * b22 - (b11 * mu_alpha - b12) * a22
    }

    pub fn det_a_exact(&self, mu_alpha: &Rational) -> Rational {
        let r = Rational::from_f64;
        let [a11, a12, _, a22] = self.a.map(r);
        let [b11, b12, _, b22] = self.b.map(r);
        let mu = mu_alpha.clone();
        (a11 * mu.clone() - a12) * b22 - (b11 * mu - b12) * a22
    }

    /// Product of the row norms of the matrix whose determinant is `det_a`.
    pub fn det_a_scale(&self, mu_alpha: f64) -> f64 {
        let [a11, a12, _, a22] = self.a;
        let [b11, b12, _, b22] = self.b;
        let r1 = (a11 * mu_alpha - a12).hypot(b11 * mu_alpha - b12);
        let r2 = a22.hypot(b22);
        r1 * r2
    }

    /// `a22 b12 - a12 b22`, the coefficient governing the large-λ behaviour
    /// on the two-interval scale (equal to `det A` there since `μ(α) = 0`).
    pub fn dense_combination(&self) -> f64 {
        self.a[3] * self.b[1] - self.a[1] * self.b[3]
    }

    /// The two forms are proportional, so the characteristic function
    /// vanishes identically.
    pub fn rows_dependent(&self) -> bool {
        let mut max = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                max = max.max((self.a[i] * self.b[j] - self.a[j] * self.b[i]).abs());
            }
        }
        let scale = self.a.iter().map(|x| x.abs()).fold(0.0, f64::max)
            * self.b.iter().map(|x| x.abs()).fold(0.0, f64::max);
        max <= 1e-14 * scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub ts: TimeScale,
    /// Frozen argument.
    pub a: f64,
    pub q: Potential,
    pub bc: BoundaryCoefficients,
}

impl ProblemSpec {
    pub fn new(ts: TimeScale, a: f64, q: Potential, bc: BoundaryCoefficients) -> Result<Self> {
        if bc.a.iter().chain(&bc.b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidProblem("boundary coefficients must be finite".into()));
        }
        if bc.a.iter().all(|&x| x == 0.0) && bc.b.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidProblem(
                "both boundary rows are identically zero".into(),
            ));
        }
        match &ts {
            TimeScale::Finite(p) => {
                let n = p.len();
                let idx = ts.grid_point(a).map_err(|_| {
                    Error::InvalidProblem(format!("frozen argument a = {a} is not a point of T"))
                })?;
                if idx.index > n - 2 {
                    return Err(Error::InvalidProblem(format!(
                        "frozen argument a = {a} must lie in T^κ (T without its maximum)"
                    )));
                }
                for &t in &p[..n - 2] {
                    match q.value(t) {
                        Some(v) if v.is_finite() => {}
                        _ => {
                            return Err(Error::InvalidProblem(format!(
                                "potential is not defined at t = {t} in T^κ²"
                            )))
                        }
                    }
                }
            }
            TimeScale::TwoInterval {
                alpha,
                delta1,
                delta2,
                beta,
            } => {
                if *delta2 <= a && a < *beta {
                    return Err(Error::InvalidProblem(format!(
                        "frozen argument a = {a} in [delta2, beta): only a in (alpha, delta1) \
                         is supported on the two-interval scale"
                    )));
                }
                if !(*alpha < a && a < *delta1) {
                    return Err(Error::InvalidProblem(format!(
                        "frozen argument a = {a} must lie in (alpha, delta1) = ({alpha}, {delta1})"
                    )));
                }
                if matches!(q, Potential::Table(_)) {
                    return Err(Error::InvalidProblem(
                        "table potentials are only valid on finite scales".into(),
                    ));
                }
                for t in [*alpha, *delta1, *delta2, *beta, a] {
                    if !q.value(t).is_some_and(f64::is_finite) {
                        return Err(Error::InvalidProblem(format!(
                            "potential is not defined at t = {t}"
                        )));
                    }
                }
            }
        }
        Ok(ProblemSpec { ts, a, q, bc })
    }

    /// `q` at a point where validation guarantees it exists.
    pub fn q_at(&self, t: f64) -> f64 {
        self.q.value(t).unwrap_or(f64::NAN)
    }

    /// Points above and below `a` on a finite scale.
    pub fn m_r(&self) -> Option<(usize, usize)> {
        self.ts.split_at(self.a).ok()
    }

    pub fn n_points(&self) -> Option<usize> {
        self.ts.points().map(|p| p.len())
    }

    pub fn kappa2(&self) -> Domain {
        self.ts.domains().kappa2
    }

    /// Graininess at `α` (zero on the two-interval scale).
    pub fn mu_alpha(&self) -> f64 {
        let alpha = self.ts.domains().alpha;
        self.ts.mu(alpha).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neumann() -> BoundaryCoefficients {
        BoundaryCoefficients::new([0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0])
    }

    #[test]
    fn frozen_argument_must_be_in_t_kappa() {
        let ts = TimeScale::uniform(6).unwrap();
        let q = Potential::Constant(1.0);
        assert!(ProblemSpec::new(ts.clone(), 4.0, q.clone(), neumann()).is_ok());
        let err = ProblemSpec::new(ts.clone(), 5.0, q.clone(), neumann()).unwrap_err();
        assert!(err.to_string().contains("T^κ"));
        assert!(ProblemSpec::new(ts, 2.5, q, neumann()).is_err());
    }

    #[test]
    fn two_interval_frozen_argument_placement() {
        let ts = TimeScale::two_interval(0.0, 1.0, 2.0, 3.0).unwrap();
        let q = Potential::Constant(0.0);
        assert!(ProblemSpec::new(ts.clone(), 0.5, q.clone(), neumann()).is_ok());
        let err = ProblemSpec::new(ts.clone(), 2.5, q.clone(), neumann()).unwrap_err();
        assert!(err.to_string().contains("(alpha, delta1)"));
        assert!(ProblemSpec::new(ts.clone(), 0.0, q.clone(), neumann()).is_err());
        assert!(ProblemSpec::new(ts, 0.5, Potential::Table(vec![]), neumann()).is_err());
    }

    #[test]
    fn table_must_cover_kappa2() {
        let ts = TimeScale::uniform(5).unwrap();
        let partial = Potential::Table(vec![(0.0, 1.0), (1.0, 2.0)]);
        assert!(ProblemSpec::new(ts.clone(), 1.0, partial, neumann()).is_err());
        let full = Potential::Table(vec![(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]);
        assert!(ProblemSpec::new(ts, 1.0, full, neumann()).is_ok());
    }

    #[test]
    fn zero_rows_are_rejected_and_dependence_flagged() {
        let ts = TimeScale::uniform(5).unwrap();
        let zero = BoundaryCoefficients::new([0.0; 4], [0.0; 4]);
        assert!(ProblemSpec::new(ts, 1.0, Potential::Constant(0.0), zero).is_err());
        let same = BoundaryCoefficients::new([1.0, 2.0, 0.0, 1.0], [1.0, 2.0, 0.0, 1.0]);
        assert!(same.rows_dependent());
        assert!(!neumann().rows_dependent());
    }

    #[test]
    fn det_a_examples() {
        // separated conditions with h: a-row (h, 1, 0, 0), b-row (0, 0, ±H, 1)
        let bc = BoundaryCoefficients::new([0.5, 1.0, 0.0, 0.0], [0.0, 0.0, -1.0, 1.0]);
        assert_eq!(bc.det_a(1.0), -0.5);
        assert_eq!(BoundaryCoefficients::new([0.0; 4], [0.0; 4]).det_a(1.0), 0.0);
        let bc = BoundaryCoefficients::new([1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 2.0, 1.0]);
        assert_eq!(bc.det_a(1.0), 0.0);
        assert_eq!(bc.det_a_exact(&Rational::from_f64(1.0)), Rational::from_f64(0.0));
    }

    #[test]
    fn sampled_potential_interpolates() {
        let q = Potential::Sampled {
            grid: vec![0.0, 1.0, 3.0],
            values: vec![0.0, 2.0, 6.0],
        };
        assert_eq!(q.value(0.5), Some(1.0));
        assert_eq!(q.value(2.0), Some(4.0));
        assert_eq!(q.value(3.0), Some(6.0));
        assert_eq!(q.value(3.5), None);
        assert_eq!(q.breakpoints(0.0, 3.0), vec![1.0]);
    }
}
