//! Gauss–Legendre rules and a globally adaptive Gauss–Kronrod (7/15) integrator.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Process-wide cached rule; rules are immutable once built.
    pub fn cached(n: usize) -> &'static GaussLegendre {
        static CACHE: OnceLock<Mutex<BTreeMap<usize, &'static GaussLegendre>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
        let mut guard = cache.lock().expect("rule cache poisoned");
        guard.entry(n).or_insert_with(|| Box::leak(Box::new(GaussLegendre::new(n))))
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrates over consecutive panels `[p_k, p_{k+1}]`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, panels: &[f64]) -> f64 {
        panels.windows(2).map(|w| self.integrate(&mut f, w[0], w[1])).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of an adaptive 1D integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult { value: 0.0, error: 0.0, evaluations: 0, converged: true };

    /// Sum of two independent pieces.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol·|value|)` or after
/// `max_subdivisions` bisections (then `converged` is false).
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    if a == b {
        return QuadResult::ZERO;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut segs: Vec<(f64, f64, f64, f64)> = vec![(a, b, v, e)];
    let mut evaluations = 15;
    let mut converged = false;
    for _ in 0..=max_subdivisions {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            converged = true;
            break;
        }
        if segs.len() > max_subdivisions {
            break;
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, s)| if s.3 > best.1 { (i, s.3) } else { best });
        let (lo, hi, _, _) = segs[idx];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evaluations += 30;
        segs[idx] = (lo, mid, v1, e1);
        segs.push((mid, hi, v2, e2));
    }
    segs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values: Vec<f64> = segs.iter().map(|s| s.2).collect();
    QuadResult { value: super::pairwise_sum(&values), error: segs.iter().map(|s| s.3).sum(), evaluations, converged }
}

/// Adaptive integration over the consecutive pieces delimited by sorted `points`.
pub fn adaptive_pieces<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    let pieces = points.len().saturating_sub(1).max(1) as f64;
    points.windows(2).fold(QuadResult::ZERO, |acc, w| {
        acc.combine(adaptive(&mut f, w[0], w[1], abs_tol / pieces, rel_tol, max_subdivisions))
    })
}

/// `∫_lo^hi ρ^p g(ρ) dρ` through the substitution `u = ρ^{p+1}`.
///
/// The substitution absorbs the power singularity, so the rule is exact for constant `g`.
/// `hi` may be infinite when `p < -1`. Requires `0 <= lo < hi` and `p != -1`.
pub fn power_weighted<F: FnMut(f64) -> f64>(
    mut g: F,
    p: f64,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> QuadResult {
    let q = p + 1.0;
    assert!(q != 0.0, "logarithmic weight is not supported");
    let ulo = if lo == 0.0 {
        if q > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lo.powf(q)
    };
    let uhi = if hi.is_infinite() {
        if q < 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        hi.powf(q)
    };
    assert!(ulo.is_finite() && uhi.is_finite(), "divergent power weight");
    let inv_q = 1.0 / q;
    let r = adaptive(
        |u| if u <= 0.0 { 0.0 } else { g(u.powf(inv_q)) },
        ulo.min(uhi),
        ulo.max(uhi),
        abs_tol * q.abs(),
        rel_tol,
        max_subdivisions,
    );
    QuadResult { value: r.value / q.abs(), error: r.error / q.abs(), ..r }
}

/// Composite fixed rule for `∫_lo^hi ρ^p g(ρ) dρ` with the same substitution as
/// [`power_weighted`]; `panels` equal pieces in `u`.
pub fn power_weighted_fixed<F: FnMut(f64) -> f64>(
    mut g: F,
    p: f64,
    lo: f64,
    hi: f64,
    panels: usize,
    order: usize,
) -> f64 {
    let q = p + 1.0;
    let ulo = if lo == 0.0 { 0.0 } else { lo.powf(q) };
    let uhi = if hi.is_infinite() { 0.0 } else { hi.powf(q) };
    let (a, b) = (ulo.min(uhi), ulo.max(uhi));
    let rule = GaussLegendre::cached(order);
    let inv_q = 1.0 / q;
    let step = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let lo_k = a + step * k as f64;
        acc += rule.integrate(|u| if u <= 0.0 { 0.0 } else { g(u.powf(inv_q)) }, lo_k, lo_k + step);
    }
    acc / q.abs()
}
