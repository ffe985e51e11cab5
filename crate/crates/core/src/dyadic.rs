//! The two-point nongraphic extreme coupling, its finite dyadic extensions,
//! and the singular distribution function `F_p` of a random number whose
//! binary digits are i.i.d. with `P(0) = p`, `P(1) = q = 1 - p`.
//!
//! Couplings stay exact. `F_p` and sampling use `f64`.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{format_rational, RatMatrix, Rational};
use crate::coupling::{extend_with_independent, Coupling, Marginal};

/// Largest truncated space (`2^depth` points) built by default.
pub const DEFAULT_SIZE_CAP: usize = 256;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DyadicError {
    #[error("p = {0} must satisfy 0 < p < 1/2")]
    InvalidP(String),
    #[error("depth must be at least {min}, got {depth}")]
    InvalidDepth { depth: usize, min: usize },
    #[error("2^{depth} points exceeds the size cap of {cap}")]
    SizeCapExceeded { depth: usize, cap: usize },
    #[error("t = {0} lies outside [0, 1]")]
    DomainError(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicSpec {
    p: Rational,
    q: Rational,
    depth: usize,
}

fn check_p(p: &Rational) -> Result<(), DyadicError> {
    let half = Rational::new(1.into(), 2.into());
    if !p.is_positive() || p >= &half {
        return Err(DyadicError::InvalidP(format_rational(p)));
    }
    Ok(())
}

impl DyadicSpec {
    pub fn new(p: Rational, depth: usize) -> Result<Self, DyadicError> {
        check_p(&p)?;
        if depth == 0 {
            return Err(DyadicError::InvalidDepth { depth, min: 1 });
        }
        Ok(Self {
            q: Rational::one() - &p,
            p,
            depth,
        })
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The digit law `(p, q)` on `{0, 1}`.
    pub fn digit_law(&self) -> Marginal {
        Marginal::new(vec![self.p.clone(), self.q.clone()]).expect("p + q = 1")
    }
}

/// `[[0, p], [p, q - p]]`: both marginals are `(p, q)`.
pub fn base_coupling(p: &Rational) -> Result<Coupling, DyadicError> {
    check_p(p)?;
    let q = Rational::one() - p;
    let m = RatMatrix::from_rows(vec![vec![Rational::zero(), p.clone()], vec![p.clone(), &q - p]]).expect("2x2");
    Ok(Coupling::from_trusted(m))
}

/// Points are bit strings `(b, z1, ..., z_{depth-1})` read as binary numbers,
/// first bit most significant. Mass at `((b, z), (b', z'))` is
/// `base(b, b') * prod_j P(z_j)` when `z = z'`, else zero.
pub fn truncated_coupling(spec: &DyadicSpec, size_cap: usize) -> Result<Coupling, DyadicError> {
    let too_big = DyadicError::SizeCapExceeded {
        depth: spec.depth,
        cap: size_cap,
    };
    let n = u32::try_from(spec.depth)
        .ok()
        .and_then(|d| 1usize.checked_shl(d))
        .ok_or(too_big.clone())?;
    if n > size_cap {
        return Err(too_big);
    }
    let base = base_coupling(&spec.p)?;
    let tail_bits = spec.depth - 1;
    let tail = 1usize << tail_bits;
    let law = [spec.p.clone(), spec.q.clone()];
    let mut m = RatMatrix::zeros(n, n);
    for z in 0..tail {
        let weight = (0..tail_bits).fold(Rational::one(), |acc, j| acc * &law[(z >> j) & 1]);
        for (b, b2) in base.support() {
            m[((b << tail_bits) | z, (b2 << tail_bits) | z)] = base.mass((b, b2)) * &weight;
        }
    }
    Ok(Coupling::from_trusted(m))
}

/// The same coupling built by repeated independent extension with `(p, q)`.
pub fn truncated_by_extension(spec: &DyadicSpec) -> Result<Coupling, DyadicError> {
    let law = spec.digit_law();
    let mut c = base_coupling(&spec.p)?;
    for _ in 1..spec.depth {
        c = extend_with_independent(&c, &law);
    }
    Ok(c)
}

/// Recursion depth after which the unresolved tail is below `tol`.
fn fp_depth(p: f64, tol: f64) -> usize {
    let r = p.max(1.0 - p);
    if tol >= 1.0 {
        return 0;
    }
    (tol.ln() / r.ln()).ceil().max(0.0) as usize
}

/// `F_p(t)` within `tol`, from `F(t) = p F(2t)` for `t < 1/2` and
/// `F(t) = p + q F(2t - 1)` for `t >= 1/2`. `F(0) = 0` and `F(1) = 1` exactly.
pub fn eval_fp(p: f64, t: f64, tol: f64) -> Result<f64, DyadicError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(DyadicError::InvalidParameter(format!("p = {p} must lie in (0, 1)")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(DyadicError::InvalidParameter(format!("tol = {tol} must be positive")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(DyadicError::DomainError(t));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let q = 1.0 - p;
    let (mut acc, mut scale, mut t) = (0.0, 1.0, t);
    for _ in 0..fp_depth(p, tol) {
        if t < 0.5 {
            scale *= p;
            t *= 2.0;
        } else {
            acc += scale * p;
            scale *= q;
            t = 2.0 * t - 1.0;
        }
        if t == 0.0 {
            return Ok(acc);
        }
    }
    // the tail contributes scale * F(t) with F(t) in [0, 1]; t is the midpoint guess
    Ok(acc + scale * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePair {
    pub xi_prime: f64,
    pub eta_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub count: usize,
    pub seed: u64,
    pub sample_depth: usize,
    pub tol: f64,
}

pub const MIN_SAMPLE_DEPTH: usize = 8;

/// Draws `(xi~, eta~)` where `(xi, eta)` follows the base coupling, the digit
/// stream `zeta_1..zeta_D` is shared, and `xi~ = xi/2 + sum_j zeta_j / 2^(j+1)`.
/// Accepts `0 < p <= 1/2`; at `p = 1/2` the base coupling is the swap. The
/// generator is ChaCha8 seeded with `seed_from_u64(seed)`.
pub fn sample_dyadic_points(p: &Rational, cfg: &SampleConfig) -> Result<Vec<(f64, f64)>, DyadicError> {
    let half = Rational::new(1.into(), 2.into());
    if !p.is_positive() || p > &half {
        return Err(DyadicError::InvalidP(format_rational(p)));
    }
    if cfg.count == 0 {
        return Err(DyadicError::InvalidParameter("count must be at least 1".into()));
    }
    if cfg.sample_depth < MIN_SAMPLE_DEPTH {
        return Err(DyadicError::InvalidDepth {
            depth: cfg.sample_depth,
            min: MIN_SAMPLE_DEPTH,
        });
    }
    if cfg.sample_depth > 1000 {
        return Err(DyadicError::InvalidParameter(
            "sample depth must be at most 1000".into(),
        ));
    }
    let p = p.to_f64().expect("finite rational");
    let q = 1.0 - p;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        // cells (0,1), (1,0), (1,1) with masses p, p, q - p
        let u: f64 = rng.random();
        let (xi, eta) = if u < p {
            (0.0, 1.0)
        } else if u < 2.0 * p {
            (1.0, 0.0)
        } else {
            (1.0, 1.0)
        };
        let mut tail = 0.0;
        let mut weight = 0.25;
        for _ in 0..cfg.sample_depth {
            if rng.random_bool(q) {
                tail += weight;
            }
            weight *= 0.5;
        }
        out.push((xi / 2.0 + tail, eta / 2.0 + tail));
    }
    Ok(out)
}

/// [`sample_dyadic_points`] pushed through `F_p`: both coordinates of each
/// pair are uniform on `[0, 1]`.
pub fn sample_transformed_pairs(p: &Rational, cfg: &SampleConfig) -> Result<Vec<SamplePair>, DyadicError> {
    let pf = p.to_f64().expect("finite rational");
    sample_dyadic_points(p, cfg)?
        .into_iter()
        .map(|(x, y)| {
            Ok(SamplePair {
                xi_prime: eval_fp(pf, x, cfg.tol)?,
                eta_prime: eval_fp(pf, y, cfg.tol)?,
            })
        })
        .collect()
}

/// Plain decimal with 17 significant digits, independent of locale.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).expect("exponent");
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn samples_to_csv(samples: &[SamplePair]) -> String {
    let mut s = String::from("xi_prime,eta_prime\n");
    for pair in samples {
        s.push_str(&format_sig17(pair.xi_prime));
        s.push(',');
        s.push_str(&format_sig17(pair.eta_prime));
        s.push('\n');
    }
    s
}

/// Kolmogorov-Smirnov distance between the empirical law of `xs` and the
/// uniform law on `[0, 1]`.
pub fn ks_uniform(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i as f64 + 1.0) / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
