//! Seeded generators for algebra vectors, group elements, band-limited loops
//! and group paths. All draws go through [`ChaCha8Rng`], so a seed fixes
//! every value on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bundle::{AlgebraField, BaseLoop, BaseManifold, Chart, ConnectionForm, GaugeTransform, TorusTerm};
use crate::error::{Error, Result};
use crate::lie::{exp_group, AlgebraVector, GroupElement, GroupId};
use crate::loops::{AlgebraLoop, GroupPath};
use crate::scalar::{lit, to_f64, Real};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child seed for the `index`-th sub-draw of a case.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    r.random()
}

pub fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Vector with independent `N(0, scale^2)` coordinates.
pub fn random_vector<T: Real, R: Rng>(group: GroupId, scale: f64, rng: &mut R) -> AlgebraVector<T> {
    let c: Vec<T> = (0..group.dim()).map(|_| lit(scale * normal(rng))).collect();
    AlgebraVector::from_coords(group, &c).expect("dimension matches")
}

pub fn random_unit_vector<T: Real, R: Rng>(group: GroupId, rng: &mut R) -> AlgebraVector<T> {
    loop {
        let v = random_vector::<T, R>(group, 1.0, rng);
        let n = v.norm();
        if n > lit(1e-3) {
            return v.scale(T::one() / n);
        }
    }
}

/// `exp` of a vector with norm uniform in `[0, max_angle)`.
pub fn random_group_element<T: Real, R: Rng>(group: GroupId, max_angle: f64, rng: &mut R) -> GroupElement<T> {
    let dir = random_unit_vector::<T, R>(group, rng);
    let r: f64 = rng.random::<f64>() * max_angle;
    exp_group(&dir.scale(lit(r)))
}

/// Closed trigonometric loop with modes `|k| <= kmax`; mode `k` has
/// coefficient scale `amplitude / (1 + k)`.
pub fn random_loop<T: Real, R: Rng>(group: GroupId, n: usize, kmax: usize, amplitude: f64, rng: &mut R) -> Result<AlgebraLoop<T>> {
    let a0 = random_vector::<T, R>(group, amplitude, rng);
    let mut cos = Vec::with_capacity(kmax);
    let mut sin = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let s = amplitude / (1.0 + k as f64);
        cos.push(random_vector::<T, R>(group, s, rng));
        sin.push(random_vector::<T, R>(group, s, rng));
    }
    AlgebraLoop::trig_polynomial(group, n, &a0, &cos, &sin)
}

/// Path `g(t) = h exp(X(t)) exp(t Z)` with `X` a random sine series, so that
/// `g(0) = h` and `g(1) = h exp(Z)`. With `based = true` the factors `h`
/// and `exp(t Z)` are dropped, so `g(0) = g(1) = e`.
pub fn random_path<T: Real, R: Rng>(group: GroupId, n: usize, kmax: usize, amplitude: f64, based: bool, rng: &mut R) -> Result<GroupPath<T>> {
    let mut sin = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        sin.push(random_vector::<T, R>(group, amplitude / k as f64, rng));
    }
    let (h, z) = if based {
        (GroupElement::identity(group), AlgebraVector::zero(group))
    } else {
        (random_group_element::<T, R>(group, 3.0, rng), random_vector::<T, R>(group, amplitude, rng))
    };
    GroupPath::from_fn(group, n, |t| {
        let mut x = AlgebraVector::zero(group);
        for (k, b) in sin.iter().enumerate() {
            x = x.axpy((T::two_pi() * lit((k + 1) as f64) * t).sin(), b);
        }
        h.mul(&exp_group(&x)).mul(&exp_group(&z.scale(t)))
    })
}

/// Torus term with mode `(m1, m2)`, `|m_i| <= max_mode`, and coefficient
/// scale `amplitude`.
fn random_term<T: Real, R: Rng>(group: GroupId, max_mode: i64, amplitude: f64, rng: &mut R) -> TorusTerm<T> {
    let mode = [rng.random_range(-max_mode..=max_mode), rng.random_range(-max_mode..=max_mode)];
    TorusTerm { mode, cos: random_vector(group, amplitude, rng), sin: random_vector(group, amplitude, rng) }
}

/// Trigonometric form on the flat torus with `terms` terms per component.
pub fn random_torus_form<T: Real, R: Rng>(base: BaseManifold<T>, group: GroupId, terms: usize, max_mode: i64, amplitude: f64, rng: &mut R) -> Result<ConnectionForm<T>> {
    let dx1 = (0..terms).map(|_| random_term(group, max_mode, amplitude, rng)).collect();
    let dx2 = (0..terms).map(|_| random_term(group, max_mode, amplitude, rng)).collect();
    ConnectionForm::torus(base, group, dx1, dx2)
}

/// Ambient-affine form on the round sphere.
pub fn random_sphere_form<T: Real, R: Rng>(base: BaseManifold<T>, group: GroupId, amplitude: f64, rng: &mut R) -> Result<ConnectionForm<T>> {
    let mut field = || AlgebraField::Affine {
        constant: random_vector(group, amplitude, rng),
        linear: [random_vector(group, amplitude, rng), random_vector(group, amplitude, rng), random_vector(group, amplitude, rng)],
    };
    ConnectionForm::sphere(base, group, [field(), field(), field()])
}

/// Gauge transformation `exp(X_1) ... exp(X_factors)` with random fields
/// matching the base.
pub fn random_gauge<T: Real, R: Rng>(base: BaseManifold<T>, group: GroupId, factors: usize, max_mode: i64, amplitude: f64, rng: &mut R) -> GaugeTransform<T> {
    let fields = (0..factors)
        .map(|_| match base {
            BaseManifold::FlatTorus { .. } => AlgebraField::Trig(vec![random_term(group, max_mode, amplitude, rng)]),
            BaseManifold::RoundSphere { .. } => AlgebraField::Affine {
                constant: random_vector(group, amplitude, rng),
                linear: [random_vector(group, amplitude, rng), random_vector(group, amplitude, rng), random_vector(group, amplitude, rng)],
            },
        })
        .collect();
    GaugeTransform::new(base, group, fields)
}

/// Constant-speed loop with `modes` random Fourier modes of size
/// `wiggle / k`; on the torus it winds once around the first circle.
/// Shapes whose rescaled chart curve comes close to a cusp are redrawn.
pub fn random_base_loop<T: Real, R: Rng>(base: BaseManifold<T>, modes: usize, wiggle: f64, speed: f64, rng: &mut R) -> Result<BaseLoop<T>> {
    for _ in 0..64 {
        let mut draw = |k: usize| -> [T; 2] { [lit(wiggle * normal(rng) / k as f64), lit(wiggle * normal(rng) / k as f64)] };
        let cos: Vec<[T; 2]> = (1..=modes).map(&mut draw).collect();
        let sin: Vec<[T; 2]> = (1..=modes).map(&mut draw).collect();
        let (chart, x0, winding) = match base {
            BaseManifold::FlatTorus { .. } => (Chart::Primary, [lit(rng.random::<f64>()), lit(rng.random::<f64>())], [1, 0]),
            BaseManifold::RoundSphere { .. } => (Chart::Primary, [lit(0.3 * normal(rng)), lit(0.3 * normal(rng))], [0, 0]),
        };
        let c = BaseLoop::with_speed(base, chart, x0, winding, cos, sin, lit(speed))?;
        if to_f64(c.regularity()) >= MIN_REGULARITY {
            return Ok(c);
        }
    }
    Err(Error::InvalidArgument(format!("speed {speed} keeps producing near-singular loops; lower the wiggle or the speed")))
}

const MIN_REGULARITY: f64 = 0.35;
