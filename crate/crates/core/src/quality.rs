//! Gate-quality bounds from transfer-matrix eigenvalues.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::hungarian;
use crate::error::{Error, Result};
use crate::scalar::{lit, modulus, to_f64, Real};

fn check_count(n: usize, d: usize) -> Result<()> {
    if d < 2 || n != d * d - 1 {
        return Err(Error::Dimension(format!("{n} eigenvalues do not match d = {d} (expected d² - 1)")));
    }
    Ok(())
}

fn sum_sq_moduli<R: Real>(eigenvalues: &[Complex<R>]) -> R {
    eigenvalues.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr())
}

/// Entanglement fidelity with the identity, `(1 + Re Σλ)/d²`.
pub fn fent_identity<R: Real>(eigenvalues: &[Complex<R>], d: usize) -> Result<R> {
    check_count(eigenvalues.len(), d)?;
    let s = eigenvalues.iter().fold(R::zero(), |acc, z| acc + z.re);
    Ok((R::one() + s) / lit((d * d) as f64))
}

/// Average gate fidelity from entanglement fidelity, `(F_ent d + 1)/(d + 1)`.
pub fn f_avg<R: Real>(f_ent: R, d: usize) -> R {
    let d: R = lit(d as f64);
    (f_ent * d + R::one()) / (d + R::one())
}

/// Largest permutation count handled by exhaustive search.
pub const XI_EXACT_LIMIT: usize = 8;
const XI_THETA_GRID: usize = 64;

/// Best-aligned overlap between a spectrum and an ideal spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiMax {
    pub value: f64,
    /// `false` when `value` comes from the phase-grid relaxation and is only
    /// guaranteed to be a lower bound on the true maximum.
    pub exact: bool,
    /// `perm[i]` is the estimate paired with ideal eigenvalue `i`.
    pub perm: Vec<usize>,
}

fn overlap(est: &[Complex<f64>], ideal: &[Complex<f64>], perm: &[usize]) -> f64 {
    ideal.iter().zip(perm).map(|(b, &j)| est[j].conj() * b).sum::<Complex<f64>>().norm()
}

/// `ξ_max = (1/N) max_π |Σ_i λ*_{π(i)} λ_i^ideal|`.
pub fn xi_max<R: Real>(eigenvalues: &[Complex<R>], ideal: &[Complex<R>]) -> Result<XiMax> {
    let n = eigenvalues.len();
    if n != ideal.len() {
        return Err(Error::Dimension(format!("{n} eigenvalues against {} ideal eigenvalues", ideal.len())));
    }
    if n == 0 {
        return Err(Error::Dimension("empty spectrum".into()));
    }
    let est: Vec<Complex<f64>> = eigenvalues.iter().map(|z| Complex::new(to_f64(z.re), to_f64(z.im))).collect();
    let ide: Vec<Complex<f64>> = ideal.iter().map(|z| Complex::new(to_f64(z.re), to_f64(z.im))).collect();
    if n <= XI_EXACT_LIMIT {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = (overlap(&est, &ide, &perm), perm.clone());
        // Heap's algorithm.
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                let v = overlap(&est, &ide, &perm);
                if v > best.0 {
                    best = (v, perm.clone());
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        return Ok(XiMax { value: best.0 / n as f64, exact: true, perm: best.1 });
    }
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for t in 0..XI_THETA_GRID {
        let theta = 2.0 * std::f64::consts::PI * t as f64 / XI_THETA_GRID as f64;
        let rot = Complex::from_polar(1.0, -theta);
        let cost: Vec<Vec<f64>> = ide.iter().map(|b| est.iter().map(|a| -(rot * a.conj() * b).re).collect()).collect();
        let perm = hungarian(&cost);
        let v = overlap(&est, &ide, &perm);
        if v > best.0 {
            best = (v, perm);
        }
    }
    Ok(XiMax { value: best.0 / n as f64, exact: false, perm: best.1 })
}

/// Upper bound on the entanglement fidelity with a target unitary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityBound {
    pub value: f64,
    pub xi: XiMax,
    /// The square-root argument `u - Σ|λ|²/N` was negative and set to 0.
    pub clamped: bool,
}

/// `F_ent ≤ (1 + N √(u - Σ|λ_j|²/N) + N ξ_max)/(N + 1)`, capped at 1.
pub fn fidelity_upper_bound<R: Real>(eigenvalues: &[Complex<R>], ideal: &[Complex<R>], u_upper: R, d: usize) -> Result<FidelityBound> {
    check_count(eigenvalues.len(), d)?;
    let u = to_f64(u_upper);
    if !(0.0..=1.0 + 1e-9).contains(&u) {
        return Err(Error::InvalidArgument(format!("unitarity bound {u} outside [0, 1]")));
    }
    let xi = xi_max(eigenvalues, ideal)?;
    let n = eigenvalues.len() as f64;
    let arg = u - to_f64(sum_sq_moduli(eigenvalues)) / n;
    let clamped = arg < 0.0;
    let value = ((1.0 + n * arg.max(0.0).sqrt() + n * xi.value) / (n + 1.0)).min(1.0);
    Ok(FidelityBound { value, xi, clamped })
}

/// The bound with `u = 1`, valid for every TPCP map.
pub fn fidelity_upper_bound_corollary<R: Real>(eigenvalues: &[Complex<R>], ideal: &[Complex<R>], d: usize) -> Result<FidelityBound> {
    fidelity_upper_bound(eigenvalues, ideal, R::one(), d)
}

/// `u ≥ (1 + Σ|λ_i|² - d)/(d(d - 1))`, floored at 0.
pub fn unitarity_lower_bound<R: Real>(eigenvalues: &[Complex<R>], d: usize) -> Result<R> {
    check_count(eigenvalues.len(), d)?;
    let df: R = lit(d as f64);
    let v = (R::one() + sum_sq_moduli(eigenvalues) - df) / (df * (df - R::one()));
    Ok(v.max(R::zero()))
}

/// Direction of the singular-value optimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

const GRID_STEP: f64 = 1e-3;
const MIN_GRID_POINTS: usize = 200;
const REFINE_STEP: f64 = 1e-7;
const SLACK: f64 = 1e-12;

struct SingularProblem {
    moduli: [f64; 3],
    product: f64,
}

impl SingularProblem {
    /// Singular values `(σ1, σ2, σ3)` for grid coordinates `(x, y)`. With a
    /// nonzero product `(x, y) = (σ2, σ3)` and σ1 is eliminated; otherwise
    /// σ3 = 0 and `(x, y) = (σ1, σ2)`.
    fn sigmas(&self, x: f64, y: f64) -> Option<[f64; 3]> {
        if self.product > 0.0 {
            if x <= 0.0 || y <= 0.0 {
                return None;
            }
            Some([self.product / (x * y), x, y])
        } else {
            Some([x, y, 0.0])
        }
    }

    fn feasible(&self, s: [f64; 3]) -> bool {
        let [a, b, c] = self.moduli;
        s[0] <= 1.0 + SLACK
            && s[0] + SLACK >= s[1]
            && s[1] + SLACK >= s[2]
            && s[2] >= -SLACK
            && s[0] + s[1] <= 1.0 + s[2] + SLACK
            && s[0] + s[1] + SLACK >= a + b
            && s[0] + s[1] + s[2] + SLACK >= a + b + c
    }

    fn eval(&self, x: f64, y: f64) -> Option<f64> {
        let s = self.sigmas(x, y)?;
        self.feasible(s).then(|| (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) / 3.0)
    }

    fn lower(&self) -> f64 {
        if self.product > 0.0 {
            self.product
        } else {
            0.0
        }
    }
}

fn better(ext: Extremum, a: f64, b: f64) -> bool {
    match ext {
        Extremum::Max => a > b,
        Extremum::Min => a < b,
    }
}

fn grid_search(p: &SingularProblem, ext: Extremum, points: usize) -> Option<(f64, f64, f64)> {
    let lo = p.lower();
    let h = (1.0 - lo) / (points - 1).max(1) as f64;
    let coord = |i: usize| if i + 1 == points { 1.0 } else { lo + h * i as f64 };
    let rows: Vec<Option<(f64, f64, f64)>> = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = coord(i);
            let mut best: Option<(f64, f64, f64)> = None;
            for j in 0..points {
                let y = coord(j);
                if let Some(v) = p.eval(x, y) {
                    if best.is_none_or(|b| better(ext, v, b.0)) {
                        best = Some((v, x, y));
                    }
                }
            }
            best
        })
        .collect();
    rows.into_iter().flatten().reduce(|a, b| if better(ext, b.0, a.0) { b } else { a })
}

fn refine(p: &SingularProblem, ext: Extremum, start: (f64, f64, f64), step: f64) -> (f64, f64, f64) {
    const HALF: i32 = 10;
    let mut cur = start;
    let mut width = 2.0 * step;
    while width >= REFINE_STEP {
        let center = cur;
        for i in -HALF..=HALF {
            for j in -HALF..=HALF {
                let x = center.1 + width * i as f64 / HALF as f64;
                let y = center.2 + width * j as f64 / HALF as f64;
                if let Some(v) = p.eval(x, y) {
                    if better(ext, v, cur.0) {
                        cur = (v, x, y);
                    }
                }
            }
        }
        if cur == center {
            width *= 0.5;
        }
    }
    cur
}

/// Extremal unitarity `(σ1² + σ2² + σ3²)/3` over singular values compatible
/// with the eigenvalue moduli and single-qubit TPCP constraints.
pub fn unitarity_extremum_qubit<R: Real>(eigenvalues: &[Complex<R>], ext: Extremum) -> Result<R> {
    check_count(eigenvalues.len(), 2)?;
    let mut moduli: Vec<f64> = eigenvalues.iter().map(|z| to_f64(modulus(*z))).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let moduli = [moduli[0], moduli[1], moduli[2]];
    if moduli[0] > 1.0 + SLACK {
        return Err(Error::Infeasible);
    }
    let p = SingularProblem { moduli, product: moduli.iter().product() };
    let width = 1.0 - p.lower();
    let mut points = ((width / GRID_STEP).ceil() as usize + 1).max(MIN_GRID_POINTS);
    if width <= SLACK {
        return p.eval(1.0, 1.0).map(lit).ok_or(Error::Infeasible);
    }
    for _ in 0..4 {
        if let Some(best) = grid_search(&p, ext, points) {
            let h = width / (points - 1) as f64;
            return Ok(lit(refine(&p, ext, best, h).0));
        }
        points *= 10;
    }
    Err(Error::Infeasible)
}

/// Upper bound on single-qubit unitarity (maximizer of the constrained
/// problem).
pub fn unitarity_upper_bound_qubit<R: Real>(eigenvalues: &[Complex<R>]) -> Result<R> {
    unitarity_extremum_qubit(eigenvalues, Extremum::Max)
}

/// `‖s‖² ≤ 1 - Σ|λ_i|² + 2 Re(λ1 λ2 λ3)`.
pub fn unitality_bound_qubit<R: Real>(eigenvalues: &[Complex<R>]) -> Result<R> {
    check_count(eigenvalues.len(), 2)?;
    let triple = eigenvalues[0] * eigenvalues[1] * eigenvalues[2];
    Ok(R::one() - sum_sq_moduli(eigenvalues) + triple.re * lit(2.0))
}

/// Unitarity `Tr[TᵀT]/N` of a transfer-matrix block.
pub fn unitarity_of_block<R: Real>(t: &nalgebra::DMatrix<R>) -> R {
    t.norm_squared() / lit(t.nrows() as f64)
}

/// `F_ent(S, U) = (1 + Tr[T_Uᵀ T_S])/d²` for unital `U`.
pub fn entanglement_fidelity<R: Real>(t_channel: &nalgebra::DMatrix<R>, t_target: &nalgebra::DMatrix<R>) -> R {
    let n = t_channel.nrows();
    let overlap = t_target.tr_mul(t_channel).trace();
    (R::one() + overlap) / lit((n + 1) as f64)
}

/// Summary of every bound derivable from one estimated spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub d: usize,
    pub f_ent_upper: f64,
    pub f_avg_upper: f64,
    /// Bound with `u = 1`; never below `f_ent_upper`.
    pub f_ent_upper_corollary: f64,
    pub u_lower: f64,
    pub u_upper: f64,
    /// Minimizer of the same constrained problem, for reference.
    pub u_upper_min: Option<f64>,
    pub unitality_s2_upper: Option<f64>,
    pub xi_max: f64,
    pub xi_exact: bool,
    pub eigenvalues: Vec<[f64; 2]>,
    pub ideal_eigenvalues: Vec<[f64; 2]>,
    pub notes: Vec<String>,
}

/// Computes all bounds for an estimated spectrum against the ideal spectrum
/// of the target gate.
pub fn quality_report(eigenvalues: &[Complex<f64>], ideal: &[Complex<f64>], d: usize) -> Result<QualityReport> {
    check_count(eigenvalues.len(), d)?;
    let mut notes = Vec::new();
    let u_lower = unitarity_lower_bound(eigenvalues, d)?;
    let (u_upper, u_upper_min, unitality) = if d == 2 {
        let (hi, lo) = match (
            unitarity_extremum_qubit(eigenvalues, Extremum::Max),
            unitarity_extremum_qubit(eigenvalues, Extremum::Min),
        ) {
            (Ok(hi), Ok(lo)) => (hi, Some(lo)),
            _ => {
                notes.push("singular-value constraints infeasible for these moduli; unitarity upper bound set to 1".into());
                (1.0, None)
            }
        };
        if eigenvalues.iter().any(|z| z.im.abs() > 1e-12) {
            notes.push("unitality bound evaluated with the real part of the triple product of a complex spectrum".into());
        }
        (hi, lo, Some(unitality_bound_qubit(eigenvalues)?))
    } else {
        notes.push("no unitarity upper bound beyond a single qubit; u = 1 used".into());
        (1.0, None, None)
    };
    let bound = fidelity_upper_bound(eigenvalues, ideal, u_upper.min(1.0), d)?;
    let corollary = fidelity_upper_bound_corollary(eigenvalues, ideal, d)?;
    if bound.clamped {
        notes.push("square-root argument of the fidelity bound was negative and clamped at 0".into());
    }
    if !bound.xi.exact {
        notes.push(format!("xi_max from a {XI_THETA_GRID}-point phase grid with linear assignment (lower bound on the exact maximum)"));
    }
    let pair = |z: &Complex<f64>| [z.re, z.im];
    Ok(QualityReport {
        d,
        f_ent_upper: bound.value,
        f_avg_upper: f_avg(bound.value, d),
        f_ent_upper_corollary: corollary.value,
        u_lower,
        u_upper,
        u_upper_min,
        unitality_s2_upper: unitality,
        xi_max: bound.xi.value,
        xi_exact: bound.xi.exact,
        eigenvalues: eigenvalues.iter().map(pair).collect(),
        ideal_eigenvalues: ideal.iter().map(pair).collect(),
        notes,
    })
}
