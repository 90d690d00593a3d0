//! Bounded time scales: finite point sets and the two-interval union
//! `[alpha, delta1] ∪ [delta2, beta]`.
//!
//! Membership is exact. Finite scales compare against the stored points,
//! two-interval scales use closed-interval comparisons.


use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum TimeScale {
    /// Strictly increasing points, at least three of them.
    Finite(Vec<f64>),
    /// `[alpha, delta1] ∪ [delta2, beta]` with `alpha < delta1 < delta2 < beta`.
    TwoInterval {
        alpha: f64,
        delta1: f64,
        delta2: f64,
        beta: f64,
    },
}

/// A point of a finite scale together with its position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub value: f64,
}

/// Descriptor of a truncated domain (`T^κ` or `T^{κ²}`).
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Points(Vec<f64>),
    Intervals(Vec<(f64, f64)>),
}

impl Domain {
    pub fn contains(&self, t: f64) -> bool {
        match self {
            Domain::Points(p) => p.iter().any(|&x| x == t),
            Domain::Intervals(iv) => iv.iter().any(|&(lo, hi)| lo <= t && t <= hi),
        }
    }
}

/// The truncated domains plus the boundary points used by the boundary forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Domains {
    pub kappa: Domain,
    pub kappa2: Domain,
    pub alpha: f64,
    pub beta: f64,
}

impl TimeScale {
    /// Builds a finite scale. The points are sorted; duplicates are rejected.
    pub fn finite(points: impl Into<Vec<f64>>) -> Result<Self> {
        let mut points = points.into();
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidTimeScale("non-finite point".into()));
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidTimeScale(format!(
                "duplicate point {}",
                w[0]
            )));
        }
        if points.len() < 3 {
            return Err(Error::InvalidTimeScale(format!(
                "a finite scale needs at least 3 points, got {}",
                points.len()
            )));
        }
        Ok(TimeScale::Finite(points))
    }

    /// Unit-spaced scale `{0, 1, ..., n-1}`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::finite((0..n).map(|i| i as f64).collect::<Vec<_>>())
    }

    pub fn two_interval(alpha: f64, delta1: f64, delta2: f64, beta: f64) -> Result<Self> {
        let ok = [alpha, delta1, delta2, beta].iter().all(|x| x.is_finite())
            && alpha < delta1
            && delta1 < delta2
            && delta2 < beta;
        if !ok {
            return Err(Error::InvalidTimeScale(format!(
                "two-interval scale needs alpha < delta1 < delta2 < beta, got \
                 {alpha}, {delta1}, {delta2}, {beta}"
            )));
        }
        Ok(TimeScale::TwoInterval {
            alpha,
            delta1,
            delta2,
            beta,
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        match self {
            TimeScale::Finite(p) => p.binary_search_by(|x| x.partial_cmp(&t).unwrap()).is_ok(),
            TimeScale::TwoInterval {
                alpha,
                delta1,
                delta2,
                beta,
            } => (*alpha <= t && t <= *delta1) || (*delta2 <= t && t <= *beta),
        }
    }

    pub fn points(&self) -> Option<&[f64]> {
        match self {
            TimeScale::Finite(p) => Some(p),
            TimeScale::TwoInterval { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TimeScale::Finite(_))
    }

    /// Position of `t` in a finite scale.
    pub fn grid_point(&self, t: f64) -> Result<GridPoint> {
        match self {
            TimeScale::Finite(p) => p
                .binary_search_by(|x| x.partial_cmp(&t).unwrap())
                .map(|index| GridPoint { index, value: t })
                .map_err(|_| Error::NotInScale(t)),
            TimeScale::TwoInterval { .. } => Err(Error::InvalidTimeScale(
                "grid points exist only on finite scales".into(),
            )),
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::NotInScale(t))
        }
    }

    /// Forward jump `σ(t) = inf{s ∈ T : s > t}`, with `σ(max T) = max T`.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self {
            TimeScale::Finite(p) => {
                let i = self.grid_point(t)?.index;
                if i + 1 < p.len() {
                    p[i + 1]
                } else {
                    t
                }
            }
            TimeScale::TwoInterval { delta1, delta2, .. } => {
                if t == *delta1 {
                    *delta2
                } else {
                    t
                }
            }
        })
    }

    /// Backward jump, with `ρ(min T) = min T`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self {
            TimeScale::Finite(p) => {
                let i = self.grid_point(t)?.index;
                if i > 0 {
                    p[i - 1]
                } else {
                    t
                }
            }
            TimeScale::TwoInterval { delta1, delta2, .. } => {
                if t == *delta2 {
                    *delta1
                } else {
                    t
                }
            }
        })
    }

    /// Graininess `μ(t) = σ(t) - t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        Ok(self.sigma(t)? - t)
    }

    /// Truncated domains and boundary points.
    ///
    /// Finite scales drop the top point for `T^κ` and the top two for
    /// `T^{κ²}`; `β = ρ(max T)`. On the two-interval scale the supremum is
    /// left-dense, so nothing is dropped and `β` is the supremum itself.
    pub fn domains(&self) -> Domains {
        match self {
            TimeScale::Finite(p) => {
                let n = p.len();
                Domains {
                    kappa: Domain::Points(p[..n - 1].to_vec()),
                    kappa2: Domain::Points(p[..n - 2].to_vec()),
                    alpha: p[0],
                    beta: p[n - 2],
                }
            }
            TimeScale::TwoInterval {
                alpha,
                delta1,
                delta2,
                beta,
            } => {
                let whole = Domain::Intervals(vec![(*alpha, *delta1), (*delta2, *beta)]);
                Domains {
                    kappa: whole.clone(),
                    kappa2: whole,
                    alpha: *alpha,
                    beta: *beta,
                }
            }
        }
    }

    /// Graininess of every point except the last, `μ_i = p_{i+1} - p_i`.
    pub fn gaps(&self) -> Option<Vec<f64>> {
        self.points()
            .map(|p| p.windows(2).map(|w| w[1] - w[0]).collect())
    }

    /// True when a finite scale has unit spacing starting at 0.
    pub fn is_unit_uniform(&self) -> bool {
        match self {
            TimeScale::Finite(p) => p.iter().enumerate().all(|(i, &x)| x == i as f64),
            _ => false,
        }
    }

    /// Number of points above and below `a` on a finite scale, `(m, r)`.
    pub fn split_at(&self, a: f64) -> Result<(usize, usize)> {
        let gp = self.grid_point(a)?;
        let n = self.points().unwrap().len();
        Ok((n - 1 - gp.index, gp.index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid6() -> TimeScale {
        TimeScale::uniform(6).unwrap()
    }

    fn gap() -> TimeScale {
        TimeScale::two_interval(0.0, 1.0, 2.0, 3.0).unwrap()
    }

    #[test]
    fn jumps_on_finite_scale() {
        let t = grid6();
        assert_eq!(t.sigma(3.0).unwrap(), 4.0);
        assert_eq!(t.rho(3.0).unwrap(), 2.0);
        assert_eq!(t.rho(0.0).unwrap(), 0.0);
        assert_eq!(t.sigma(5.0).unwrap(), 5.0);
        let t = TimeScale::finite(vec![0.0, 0.5, 2.0, 3.0]).unwrap();
        assert_eq!(t.mu(0.5).unwrap(), 1.5);
    }

    #[test]
    fn jumps_on_two_interval_scale() {
        let t = gap();
        assert_eq!(t.sigma(1.0).unwrap(), 2.0);
        assert_eq!(t.sigma(2.5).unwrap(), 2.5);
        assert_eq!(t.rho(2.0).unwrap(), 1.0);
        assert_eq!(t.mu(1.0).unwrap(), 1.0);
        assert_eq!(t.mu(0.0).unwrap(), 0.0);
    }

    #[test]
    fn points_outside_are_rejected() {
        assert!(matches!(grid6().sigma(2.5), Err(Error::NotInScale(_))));
        assert!(matches!(gap().rho(1.5), Err(Error::NotInScale(_))));
        assert!(gap().mu(3.5).is_err());
    }

    #[test]
    fn domains_match_boundary_points() {
        let d = grid6().domains();
        assert_eq!(d.kappa2, Domain::Points(vec![0.0, 1.0, 2.0, 3.0]));
        assert_eq!((d.alpha, d.beta), (0.0, 4.0));

        let d = gap().domains();
        assert_eq!(d.kappa2, d.kappa);
        assert!(d.kappa2.contains(3.0) && !d.kappa2.contains(1.5));
        assert_eq!((d.alpha, d.beta), (0.0, 3.0));

        let d = TimeScale::uniform(3).unwrap().domains();
        assert_eq!(d.kappa2, Domain::Points(vec![0.0]));
        assert_eq!((d.alpha, d.beta), (0.0, 1.0));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(TimeScale::finite(vec![0.0, 1.0, 1.0, 2.0]).is_err());
        assert!(TimeScale::finite(vec![0.0, 1.0]).is_err());
        assert!(TimeScale::two_interval(0.0, 2.0, 2.0, 3.0).is_err());
        assert!(TimeScale::two_interval(0.0, 2.0, 1.0, 3.0).is_err());
        // unsorted input is sorted, not rejected
        let t = TimeScale::finite(vec![2.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.points().unwrap(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn iterating_jumps_from_a_reaches_the_ends() {
        let t = TimeScale::finite(vec![-1.0, 0.25, 0.5, 2.0, 2.5, 4.0, 7.0]).unwrap();
        let a = 2.0;
        let (m, r) = t.split_at(a).unwrap();
        let mut x = a;
        for _ in 0..m {
            x = t.sigma(x).unwrap();
        }
        assert_eq!(x, 7.0);
        let mut x = a;
        for _ in 0..r {
            x = t.rho(x).unwrap();
        }
        assert_eq!(x, -1.0);
        assert_eq!(m + r + 1, t.points().unwrap().len());
    }

    proptest::proptest! {
        #[test]
        fn sigma_rho_are_inverse(gaps in proptest::collection::vec(0.01f64..3.0, 2..15)) {
            let mut pts = vec![0.0];
            for g in &gaps {
                let last = *pts.last().unwrap();
                pts.push(last + g);
            }
            let t = TimeScale::finite(pts.clone()).unwrap();
            for &x in &pts {
                let s = t.sigma(x).unwrap();
                if s > x {
                    proptest::prop_assert_eq!(t.rho(s).unwrap(), x);
                }
                let r = t.rho(x).unwrap();
                if r < x {
                    proptest::prop_assert_eq!(t.sigma(r).unwrap(), x);
                }
                proptest::prop_assert!(t.mu(x).unwrap() >= 0.0);
            }
        }
    }
}
