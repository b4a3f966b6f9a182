//! Adaptive Gauss-Kronrod (10/21) quadrature over vector-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::geometry::{AngularMomentum2, FieldStrength, MVec3};

/// Kronrod abscissae on [0, 1], descending; odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Values that can be integrated: closed under addition and scaling, with a norm.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for MVec3 {
    fn zero() -> Self {
        MVec3::ZERO
    }
    fn norm(&self) -> f64 {
        self.max_abs()
    }
}

impl Integrand for FieldStrength {
    fn zero() -> Self {
        FieldStrength::ZERO
    }
    fn norm(&self) -> f64 {
        self.max_abs()
    }
}

impl Integrand for AngularMomentum2 {
    fn zero() -> Self {
        AngularMomentum2::ZERO
    }
    fn norm(&self) -> f64 {
        self.max_abs()
    }
}

/// Pair of integrands evaluated together so they share abscissae.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair<A, B>(pub A, pub B);

impl<A: Integrand, B: Integrand> Add for Pair<A, B> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl<A: Integrand, B: Integrand> Sub for Pair<A, B> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}

impl<A: Integrand, B: Integrand> Mul<f64> for Pair<A, B> {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Pair(self.0 * k, self.1 * k)
    }
}

impl<A: Integrand, B: Integrand> Integrand for Pair<A, B> {
    fn zero() -> Self {
        Pair(A::zero(), B::zero())
    }
    fn norm(&self) -> f64 {
        self.0.norm().max(self.1.norm())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-9, abs_tol: 1e-15, max_intervals: 50_000 }
    }
}

impl QuadOptions {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        QuadOptions { rel_tol, abs_tol, ..Default::default() }
    }
}

/// One 21-point Kronrod rule on [a, b] with the Gauss-Kronrod difference as error.
pub fn gk21<T, F>(f: &mut F, a: f64, b: f64) -> Result<(T, f64)>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[10];
    let mut gauss = T::zero();
    for j in 0..10 {
        let dx = hl * XGK[j];
        let sum = f(c - dx)? + f(c + dx)?;
        kron = kron + sum * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let kron = kron * hl;
    let gauss = gauss * hl;
    let err = (kron - gauss).norm();
    // Rounding floor so that converged smooth intervals stop splitting.
    let floor = 50.0 * f64::EPSILON * kron.norm();
    Ok((kron, err.max(floor)))
}

struct Interval<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Interval<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl<T> Eq for Interval<T> {}

impl<T> PartialOrd for Interval<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Interval<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive integration of `f` over [a, b].
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evaluations: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("integration bounds must be finite: [{a}, {b}]")));
    }
    let (value, error) = gk21(&mut f, a, b)?;
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature { value: total.norm(), error: total_err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature { value: total.norm(), error: total_err });
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, worst.b)?;
        evaluations += 42;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum in left-to-right order for a reproducible result.
    let mut parts: Vec<_> = heap.into_vec();
    parts.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = T::zero();
    let mut error = 0.0;
    for p in &parts {
        value = value + p.value;
        error += p.error;
    }
    Ok(QuadResult { value, error, evaluations })
}

/// Integrate `f` over [a, b] when `f` behaves like `1/sqrt(b - t)` near `b`.
///
/// Uses `t = b - w^2`, which makes the integrand bounded in `w`.
pub fn integrate_sqrt_upper<T, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    if b <= a {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evaluations: 0 });
    }
    let wmax = (b - a).sqrt();
    integrate(
        |w: f64| {
            if w == 0.0 {
                return Ok(T::zero());
            }
            Ok(f(b - w * w)? * (2.0 * w))
        },
        0.0,
        wmax,
        opts,
    )
}

/// Integrate `f` over [a, b] when `f` behaves like `1/sqrt(t - a)` near `a`.
pub fn integrate_sqrt_lower<T, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult<T>>
where
    T: Integrand,
    F: FnMut(f64) -> Result<T>,
{
    if b <= a {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evaluations: 0 });
    }
    let wmax = (b - a).sqrt();
    integrate(
        |w: f64| {
            if w == 0.0 {
                return Ok(T::zero());
            }
            Ok(f(a + w * w)? * (2.0 * w))
        },
        0.0,
        wmax,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<T>(v: T) -> Result<T> {
        Ok(v)
    }

    #[test]
    fn weights_sum_to_one() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_rule_exact_for_polynomials() {
        // Kronrod part is exact to degree 31, Gauss part to degree 19.
        for deg in 0..=31 {
            let mut f = |x: f64| ok(x.powi(deg));
            let (v, _) = gk21(&mut f, 0.0, 1.0).unwrap();
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
        for deg in 0..=19 {
            let mut f = |x: f64| ok(x.powi(deg));
            let (_, err) = gk21(&mut f, 0.0, 1.0).unwrap();
            assert!(err < 2e-14, "degree {deg}: gauss mismatch {err}");
        }
        let mut f = |x: f64| ok(x.powi(24));
        let (_, err) = gk21(&mut f, 0.0, 1.0).unwrap();
        assert!(err > 1e-10, "degree 24 should expose the Gauss rule");
    }

    #[test]
    fn adaptive_handles_peaks() {
        let r = integrate(|x: f64| ok(1.0 / (1e-4 + x * x)), -1.0, 1.0, QuadOptions::new(1e-12, 0.0)).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn endpoint_substitution_inverse_sqrt() {
        let opts = QuadOptions::new(1e-13, 0.0);
        let r = integrate_sqrt_upper(|t: f64| ok(1.0 / (1.0 - t).sqrt()), 0.0, 1.0, opts).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        let r = integrate_sqrt_lower(|t: f64| ok(t.cos() / t.sqrt()), 0.0, 2.0, opts).unwrap();
        // Fresnel-type integral: 2 * sum (-1)^k x^(4k+1)/((2k)! (4k+1)) at x = sqrt(2).
        let x: f64 = 2.0f64.sqrt();
        let mut s = 0.0;
        let mut fact = 1.0;
        for k in 0..30 {
            if k > 0 {
                fact *= (2 * k - 1) as f64 * (2 * k) as f64;
            }
            s += (-1.0f64).powi(k) * x.powi(4 * k + 1) / (fact * (4 * k + 1) as f64);
        }
        assert!((r.value - 2.0 * s).abs() < 1e-12);
    }

    #[test]
    fn vector_integrands_share_nodes() {
        let r = integrate(
            |t: f64| ok(Pair(MVec3::new(1.0, t, t * t), t.exp())),
            0.0,
            1.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((r.value.0.y - 1.0 / 3.0).abs() < 1e-14);
        assert!((r.value.1 - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn errors_propagate() {
        let r: Result<QuadResult<f64>> = integrate(
            |t: f64| if t > 0.5 { Err(Error::invalid("boom")) } else { Ok(t) },
            0.0,
            1.0,
            QuadOptions::default(),
        );
        assert!(r.is_err());
        let r = integrate(|t: f64| ok(1.0 / t), 0.0, 1.0, QuadOptions { max_intervals: 50, ..Default::default() });
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn zero_width_interval() {
        let r = integrate(|t: f64| ok(t), 1.0, 1.0, QuadOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
