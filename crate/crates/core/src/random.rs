//! Random small-height Gaussian rationals and generic configurations.

use num_traits::Zero;
use rand::Rng;

use crate::exactnum::GaussianRational;
use crate::kernels::BetheConfig;
use crate::spectral::Direction;

/// A Gaussian rational whose four integers are bounded by `height`.
pub fn random_grat<R: Rng + ?Sized>(rng: &mut R, height: i64) -> GaussianRational {
    let h = height.max(1);
    GaussianRational::from_parts(
        rng.gen_range(-h..=h),
        rng.gen_range(1..=h),
        rng.gen_range(-h..=h),
        rng.gen_range(1..=h),
    )
}

/// Like [`random_grat`] but never zero.
pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, height: i64) -> GaussianRational {
    loop {
        let x = random_grat(rng, height);
        if !x.is_zero() {
            return x;
        }
    }
}

/// `n` nonzero random values.
pub fn random_values<R: Rng + ?Sized>(rng: &mut R, n: usize, height: i64) -> Vec<GaussianRational> {
    (0..n).map(|_| random_nonzero(rng, height)).collect()
}

fn collides(x: &GaussianRational, y: &GaussianRational, c: &GaussianRational) -> bool {
    let d = x - y;
    d.is_zero() || (&d - c).is_zero() || (&d + c).is_zero()
}

/// `n` points whose pairwise differences, and differences with `avoid`,
/// are never 0 or ±c. Returns the points and the number of re-draws.
pub fn random_points_counted<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    c: &GaussianRational,
    height: i64,
    avoid: &[GaussianRational],
) -> (Vec<GaussianRational>, usize) {
    let mut out: Vec<GaussianRational> = Vec::with_capacity(n);
    let mut redraws = 0;
    while out.len() < n {
        let x = random_grat(rng, height);
        if avoid.iter().chain(&out).any(|y| collides(&x, y, c)) {
            redraws += 1;
            continue;
        }
        out.push(x);
    }
    (out, redraws)
}

pub fn random_points<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    c: &GaussianRational,
    height: i64,
    avoid: &[GaussianRational],
) -> Vec<GaussianRational> {
    random_points_counted(rng, n, c, height, avoid).0
}

/// A generic configuration with cardinalities (a, b): random c, ϰ, κ̄, and
/// random free r₁, r₃ values at every parameter.
pub fn random_config<R: Rng + ?Sized>(rng: &mut R, a: usize, b: usize, height: i64) -> BetheConfig<GaussianRational> {
    random_config_counted(rng, a, b, height).0
}

/// [`random_config`] together with the number of collision re-draws.
pub fn random_config_counted<R: Rng + ?Sized>(
    rng: &mut R,
    a: usize,
    b: usize,
    height: i64,
) -> (BetheConfig<GaussianRational>, usize) {
    let c = random_nonzero(rng, height);
    let (pts, redraws) = random_points_counted(rng, 2 * a + 2 * b, &c, height, &[]);
    let mut it = pts.into_iter();
    let mut take = |n: usize| it.by_ref().take(n).collect::<Vec<_>>();
    let (u_c, v_c, u_b, v_b) = (take(a), take(b), take(a), take(b));
    let mut cfg = BetheConfig::new(c, u_c, v_c, u_b, v_b).expect("generic points");
    cfg.varkappa = random_nonzero(rng, height);
    cfg.kappa = [random_nonzero(rng, height), random_nonzero(rng, height), random_nonzero(rng, height)];
    for p in cfg.all_points() {
        let (r1, r3) = (random_nonzero(rng, height), random_nonzero(rng, height));
        cfg.r1_table.insert(p.clone(), r1, None);
        cfg.r3_table.insert(p, r3, None);
    }
    (cfg, redraws)
}


/// Input of one norm check: roots ū, v̄, the constant c, two approach
/// directions and free derivatives r′₁ = d at ū, r′₃ = e at v̄.
#[derive(Debug, Clone, PartialEq)]
pub struct NormData {
    pub u: Vec<GaussianRational>,
    pub v: Vec<GaussianRational>,
    pub c: GaussianRational,
    pub directions: Vec<Direction>,
    pub d: Vec<GaussianRational>,
    pub e: Vec<GaussianRational>,
}

/// Random [`NormData`] with |ū| = a, |v̄| = b and the number of re-draws.
pub fn random_norm_data<R: Rng + ?Sized>(rng: &mut R, a: usize, b: usize, height: i64) -> (NormData, usize) {
    let c = random_nonzero(rng, height);
    let (p, redraws) = random_points_counted(rng, a + b, &c, height, &[]);
    let directions =
        (0..2).map(|_| Direction { du: random_values(rng, a, height), dv: random_values(rng, b, height) }).collect();
    let (d, e) = (random_values(rng, a, height), random_values(rng, b, height));
    (NormData { u: p[..a].to_vec(), v: p[a..].to_vec(), c, directions, d, e }, redraws)
}
