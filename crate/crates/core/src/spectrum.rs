use num_complex::Complex64;

use crate::poly::RootSet;

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Solver-specific residual diagnostic.
    pub residual: f64,
}

/// Eigenvalues with multiplicities, sorted by `(Re, Im)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Eigenvalue>,
}

fn order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Eigenvalue>) -> Self {
        eigenvalues.sort_by(|a, b| order(&a.value, &b.value));
        Spectrum { eigenvalues }
    }

    pub fn from_roots(roots: &RootSet) -> Self {
        Self::new(
            roots
                .roots
                .iter()
                .map(|r| Eigenvalue {
                    value: r.value,
                    multiplicity: r.multiplicity,
                    residual: r.residual,
                })
                .collect(),
        )
    }

    /// Total count with multiplicity.
    pub fn count(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues repeated by multiplicity.
    pub fn flatten(&self) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat(e.value).take(e.multiplicity))
            .collect();
        v.sort_by(order);
        v
    }

    /// Bottleneck distance between the two multisets under the best
    /// one-to-one matching; infinite when the counts differ.
    pub fn distance(&self, other: &Spectrum) -> f64 {
        matching_distance(&self.flatten(), &other.flatten())
    }

    /// Every eigenvalue has a partner near its conjugate with the same
    /// multiplicity.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let flat = self.flatten();
        let conj: Vec<Complex64> = flat.iter().map(|z| z.conj()).collect();
        matching_distance(&flat, &conj) <= tol
    }
}

/// Min over bijections of the max pairwise distance. Exact bitmask DP,
/// fine for the spectrum sizes handled here (≤ 20).
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    if n > 20 {
        // sorted pairing as a fallback for long lists
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        x.sort_by(order);
        y.sort_by(order);
        return x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    }
    let mut dp = vec![f64::INFINITY; 1 << n];
    dp[0] = 0.0;
    for mask in 0..(1usize << n) {
        let i = mask.count_ones() as usize;
        if i >= n || dp[mask].is_infinite() {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let cost = dp[mask].max((a[i] - b[j]).norm());
                if cost < dp[next] {
                    dp[next] = cost;
                }
            }
        }
    }
    dp[(1 << n) - 1]
}
