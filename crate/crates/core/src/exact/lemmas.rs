use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::{rank_over_field, QuadElem, QuadField, RatMatrix};
use crate::{Error, Result};

/// Pair of `e × r` matrices over `ℚ(√D)` and an integer `2 × 2` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RankInstance {
    pub field: QuadField,
    pub m: Vec<Vec<QuadElem>>,
    pub m_tilde: Vec<Vec<QuadElem>>,
    pub b: [[i64; 2]; 2],
}

/// Witness rank and whether the claimed bound held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankCheck {
    pub rank: usize,
    pub holds: bool,
}

fn shape(m: &[Vec<QuadElem>]) -> Result<(usize, usize)> {
    let e = m.len();
    let r = m.first().map_or(0, Vec::len);
    if e == 0 || r == 0 || m.iter().any(|row| row.len() != r) {
        return Err(Error::InvalidArgument(
            "matrix must be non-empty and rectangular".into(),
        ));
    }
    Ok((e, r))
}

fn det2(b: &[[i64; 2]; 2]) -> i128 {
    b[0][0] as i128 * b[1][1] as i128 - b[0][1] as i128 * b[1][0] as i128
}

impl RankInstance {
    pub fn e(&self) -> usize {
        self.m.len()
    }

    pub fn r(&self) -> usize {
        self.m.first().map_or(0, Vec::len)
    }

    pub fn b_matrix(&self) -> RatMatrix {
        RatMatrix::from_ints(&self.b)
    }

    fn check_preconditions(&self) -> Result<()> {
        let (e, r) = shape(&self.m)?;
        if shape(&self.m_tilde)? != (e, r) {
            return Err(Error::InvalidArgument("M and M̃ differ in shape".into()));
        }
        if rank_over_field(&self.field, &self.m) < r {
            return Err(Error::PreconditionViolated(
                "M does not have full column rank",
            ));
        }
        if det2(&self.b) >= 0 {
            return Err(Error::PreconditionViolated("det B must be negative"));
        }
        Ok(())
    }
}

/// Blocks `A(m_st) + A(m̃_st)·B`, a `2e × 2r` rational matrix.
pub fn hat_matrix_lemma1(inst: &RankInstance) -> Result<RatMatrix> {
    inst.check_preconditions()?;
    let (e, r) = (inst.e(), inst.r());
    let b = inst.b_matrix();
    let mut out = RatMatrix::zeros(2 * e, 2 * r);
    for s in 0..e {
        for t in 0..r {
            let blk =
                &inst.field.embed(&inst.m[s][t]) + &(&inst.field.embed(&inst.m_tilde[s][t]) * &b);
            out.set_block(2 * s, 2 * t, &blk);
        }
    }
    Ok(out)
}

/// Rank of the lemma-1 matrix against the bound `rank ≥ r`.
pub fn check_lemma1(inst: &RankInstance) -> Result<RankCheck> {
    let rank = hat_matrix_lemma1(inst)?.exact_rank();
    Ok(RankCheck {
        rank,
        holds: rank >= inst.r(),
    })
}

/// Blocks `A(m_st)`, a `2e × 2r` rational matrix.
pub fn hat_matrix_lemma2(field: &QuadField, m: &[Vec<QuadElem>]) -> Result<RatMatrix> {
    let (e, r) = shape(m)?;
    if rank_over_field(field, m) < r {
        return Err(Error::PreconditionViolated(
            "M does not have full column rank",
        ));
    }
    let mut out = RatMatrix::zeros(2 * e, 2 * r);
    for s in 0..e {
        for t in 0..r {
            out.set_block(2 * s, 2 * t, &field.embed(&m[s][t]));
        }
    }
    Ok(out)
}

/// Rank of the lemma-2 matrix against the claim `rank = 2r`.
pub fn check_lemma2(field: &QuadField, m: &[Vec<QuadElem>]) -> Result<RankCheck> {
    let r = shape(m)?.1;
    let rank = hat_matrix_lemma2(field, m)?.exact_rank();
    Ok(RankCheck {
        rank,
        holds: rank == 2 * r,
    })
}

/// `D` values drawn by the fuzz generators.
pub const FUZZ_DISCRIMINANTS: [i64; 5] = [-1, -2, -3, -7, -11];

/// Largest numerator and denominator drawn by the fuzz generators.
pub const FUZZ_HEIGHT: i64 = 10;

/// Largest `e` and `r` drawn by the fuzz generators.
pub const FUZZ_MAX_DIM: usize = 4;

fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    // Zero with probability 1/2.
    if rng.gen_bool(0.5) {
        return BigRational::from_integer(0.into());
    }
    let n = rng.gen_range(-FUZZ_HEIGHT..=FUZZ_HEIGHT);
    let d = rng.gen_range(1..=FUZZ_HEIGHT);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_quad<R: Rng + ?Sized>(rng: &mut R) -> QuadElem {
    QuadElem::new(random_rational(rng), random_rational(rng))
}

pub fn random_field<R: Rng + ?Sized>(rng: &mut R) -> QuadField {
    let d = FUZZ_DISCRIMINANTS[rng.gen_range(0..FUZZ_DISCRIMINANTS.len())];
    QuadField::new(d).expect("negative discriminant")
}

fn random_matrix<R: Rng + ?Sized>(rng: &mut R, e: usize, r: usize) -> Vec<Vec<QuadElem>> {
    (0..e)
        .map(|_| (0..r).map(|_| random_quad(rng)).collect())
        .collect()
}

/// Random `e × r` matrix of full column rank over `field`, `r ≤ e ≤ 4`.
pub fn random_full_rank<R: Rng + ?Sized>(rng: &mut R, field: &QuadField) -> Vec<Vec<QuadElem>> {
    let e = rng.gen_range(1..=FUZZ_MAX_DIM);
    let r = rng.gen_range(1..=e);
    loop {
        let m = random_matrix(rng, e, r);
        if rank_over_field(field, &m) == r {
            return m;
        }
    }
}

/// Integer matrix with entries in `[-10, 10]` and negative determinant.
pub fn random_negative_det<R: Rng + ?Sized>(rng: &mut R) -> [[i64; 2]; 2] {
    loop {
        let b = [
            [rng.gen_range(-10..=10), rng.gen_range(-10..=10)],
            [rng.gen_range(-10..=10), rng.gen_range(-10..=10)],
        ];
        if det2(&b) < 0 {
            return b;
        }
    }
}

pub fn random_lemma1_instance<R: Rng + ?Sized>(rng: &mut R) -> RankInstance {
    let field = random_field(rng);
    let m = random_full_rank(rng, &field);
    let m_tilde = random_matrix(rng, m.len(), m[0].len());
    RankInstance {
        field,
        m,
        m_tilde,
        b: random_negative_det(rng),
    }
}

/// Outcome of a fuzz run over both lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FuzzSummary {
    pub trials: usize,
    pub lemma1_violations: usize,
    pub lemma2_violations: usize,
    /// Smallest `rank − r` seen for lemma 1.
    pub lemma1_min_slack: Option<usize>,
}

impl FuzzSummary {
    pub fn violations(&self) -> usize {
        self.lemma1_violations + self.lemma2_violations
    }
}

/// Checks `trials` random instances of each lemma.
pub fn fuzz_lemmas<R: Rng + ?Sized>(rng: &mut R, trials: usize) -> FuzzSummary {
    let mut out = FuzzSummary {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let inst = random_lemma1_instance(rng);
        let c1 = check_lemma1(&inst).expect("generated instance is valid");
        if !c1.holds {
            out.lemma1_violations += 1;
        }
        let slack = c1.rank.saturating_sub(inst.r());
        out.lemma1_min_slack = Some(out.lemma1_min_slack.map_or(slack, |s| s.min(slack)));
        let c2 = check_lemma2(&inst.field, &inst.m).expect("generated matrix is valid");
        if !c2.holds {
            out.lemma2_violations += 1;
        }
    }
    out
}

/// Rank of `{A(1), A(√D), A(1)·B, A(√D)·B}` as vectors in `ℚ⁴`; it is 4
/// exactly when `A₁ + A₂·B = 0` forces `A₁ = A₂ = 0` on the image of `A`.
pub fn direct_sum_rank(field: &QuadField, b: &[[i64; 2]; 2]) -> usize {
    let bm = RatMatrix::from_ints(b);
    let one = field.embed(&field.one());
    let root = field.embed(&field.sqrt_d());
    let gens = [&one * &bm, &root * &bm, one, root];
    let rows = gens
        .iter()
        .map(|g| (0..4).map(|k| g.get(k / 2, k % 2).clone()).collect())
        .collect();
    RatMatrix::from_rows(rows).exact_rank()
}
