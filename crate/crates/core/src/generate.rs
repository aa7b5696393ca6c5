//! Seeded random families of polyhedral functions with audited structural flags.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{AffinePiece, PolyhedralFunction};
use crate::polyhedron::{HalfSpace, Polyhedron};
use crate::rational::{q, ExtendedRational, Rational};
use crate::sup::{check_qc1, check_qc2, FamilyOrder, FunctionFamily};
use crate::vector::QVector;

pub const MAX_DIM: usize = 4;
pub const MAX_MEMBERS: usize = 6;
pub const MAX_PIECES: usize = 5;
/// Attempts before giving up on a flag combination.
pub const MAX_ATTEMPTS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Box,
    Halfspaces,
    FullSpace,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorFlags {
    pub force_epi_pointed: bool,
    pub force_increasing: bool,
    pub force_qc1: bool,
    pub force_qc2: bool,
    pub break_qc2: bool,
    /// Every member takes the same value at the suggested point.
    pub equal_at_point: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub dim: usize,
    pub member_count: usize,
    pub pieces_per_member: usize,
    pub domain_kind: DomainKind,
    #[serde(default)]
    pub flags: GeneratorFlags,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(dim: usize, member_count: usize, pieces_per_member: usize, domain_kind: DomainKind, seed: u64) -> Self {
        GeneratorParams { dim, member_count, pieces_per_member, domain_kind, flags: GeneratorFlags::default(), seed }
    }

    pub fn with_flags(mut self, flags: GeneratorFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(what.to_string()));
        if self.dim == 0 || self.dim > MAX_DIM {
            return bad(&format!("dim must be in 1..={MAX_DIM}"));
        }
        if self.member_count == 0 || self.member_count > MAX_MEMBERS {
            return bad(&format!("member_count must be in 1..={MAX_MEMBERS}"));
        }
        if self.pieces_per_member == 0 || self.pieces_per_member > MAX_PIECES {
            return bad(&format!("pieces_per_member must be in 1..={MAX_PIECES}"));
        }
        let f = &self.flags;
        let conflict = |why: &str| Err(Error::Generation(why.to_string()));
        if f.break_qc2 && f.force_qc2 {
            return conflict("break_qc2 contradicts force_qc2");
        }
        if f.break_qc2 && self.member_count < 2 {
            return conflict("break_qc2 needs at least two members");
        }
        if f.break_qc2 && f.force_increasing {
            return conflict("break_qc2 plants different domains, which force_increasing forbids");
        }
        Ok(())
    }
}

/// A generated family with auxiliary sets, a robust-infimum region and a base point.
#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub family: FunctionFamily,
    pub sets: Vec<(String, Polyhedron)>,
    pub robust_b: Option<Polyhedron>,
    pub point: QVector,
}

struct Draw<'a> {
    rng: &'a mut ChaCha8Rng,
    n: usize,
    z: QVector,
}

impl Draw<'_> {
    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    fn vector(&mut self, r: i64) -> QVector {
        (0..self.n).map(|_| Rational::from_int(self.int(-r, r))).collect()
    }

    fn nonzero_vector(&mut self, r: i64) -> QVector {
        loop {
            let v = self.vector(r);
            if !v.is_zero() {
                return v;
            }
        }
    }

    fn pieces(&mut self, k: usize) -> Vec<AffinePiece> {
        (0..k).map(|_| AffinePiece::new(self.vector(3), Rational::from_int(self.int(-3, 3)))).collect()
    }

    /// A box around `z`, possibly with `z` on its boundary.
    fn boxed(&mut self) -> Polyhedron {
        let mut lo = self.z.clone();
        let mut hi = self.z.clone();
        for i in 0..self.n {
            let (a, b) = loop {
                let (a, b) = (self.int(0, 3), self.int(0, 3));
                if a + b > 0 {
                    break (a, b);
                }
            };
            lo[i] = &lo[i] - &Rational::from_int(a);
            hi[i] = &hi[i] + &Rational::from_int(b);
        }
        Polyhedron::boxed(&lo, &hi).expect("ordered bounds")
    }

    /// One or two halfspaces containing `z`, possibly through it.
    fn halfspaces(&mut self, max_slack: i64) -> Polyhedron {
        let k = self.int(1, 2) as usize;
        let rows = (0..k)
            .map(|_| {
                let a = self.nonzero_vector(2);
                let c = self.int(0, max_slack);
                let off = &a.dot(&self.z) + &Rational::from_int(c);
                HalfSpace::new(a, off)
            })
            .collect();
        Polyhedron::new(self.n, rows, Vec::new()).expect("valid rows")
    }

    fn domain(&mut self, kind: DomainKind) -> Polyhedron {
        match kind {
            DomainKind::Box => self.boxed(),
            DomainKind::Halfspaces => self.halfspaces(2),
            DomainKind::FullSpace => Polyhedron::universe(self.n),
        }
    }
}

fn perturbation(n: usize) -> Vec<AffinePiece> {
    // eps |x|_1 with eps = 1/2
    PolyhedralFunction::l1_norm(n, &q(1, 2)).pieces().to_vec()
}

fn attempt(p: &GeneratorParams, rng: &mut ChaCha8Rng) -> Result<Option<GeneratedInstance>> {
    let n = p.dim;
    let f = &p.flags;
    let z: QVector = (0..n).map(|_| Rational::from_int(rng.gen_range(-1..=1))).collect();
    let mut d = Draw { rng, n, z: z.clone() };
    let labels: Vec<String> = (0..p.member_count).map(|t| format!("f{t}")).collect();
    let mut members: Vec<(String, PolyhedralFunction)> = Vec::new();
    if f.force_increasing {
        let dom = d.domain(p.domain_kind);
        let k = d.int(1, p.pieces_per_member as i64) as usize;
        let mut pieces = d.pieces(k);
        pieces.push(AffinePiece::new(QVector::zeros(n), Rational::zero()));
        if f.equal_at_point {
            // g(z) = 0 = min g, so every member equals its offset at z
            for pc in &mut pieces {
                pc.b = pc.b.clone().min(-pc.a.dot(&z));
            }
        }
        if f.force_epi_pointed {
            pieces.extend(perturbation(n));
        }
        let g = PolyhedralFunction::new(n, pieces, dom)?;
        let mut c = Rational::from_int(d.int(-2, 2));
        for (t, label) in labels.iter().enumerate() {
            let alpha = q(t as i64 + 2, 2);
            if t > 0 && !f.equal_at_point {
                c = &c + &Rational::from_int(d.int(0, 1));
            }
            members.push((label.clone(), g.scale_shift(&alpha, &c)?));
        }
    } else {
        for (t, label) in labels.iter().enumerate() {
            let mut dom = d.domain(p.domain_kind);
            if f.break_qc2 && t < 2 {
                let sign = if t == 0 { Rational::one() } else { -Rational::one() };
                let e = QVector::unit(n, 0).scale(&sign);
                let off = e.dot(&z);
                dom = dom.intersect(&Polyhedron::new(n, vec![HalfSpace::new(e, off)], Vec::new())?)?;
            }
            let k = d.int(1, p.pieces_per_member as i64) as usize;
            let mut pieces = d.pieces(k);
            if f.force_epi_pointed {
                pieces.extend(perturbation(n));
            }
            let mut g = PolyhedralFunction::new(n, pieces, dom)?;
            if f.equal_at_point {
                let ExtendedRational::Finite(v) = g.eval(&z) else { unreachable!("z is in every domain") };
                g = g.scale_shift(&Rational::one(), &-&v)?;
            }
            members.push((label.clone(), g));
        }
    }
    let order = f.force_increasing.then(|| FamilyOrder::chain(&labels, true));
    let family = FunctionFamily::new(members, order)?;
    let set_count = d.int(2, 3) as usize;
    let sets = (0..set_count).map(|i| (format!("C{i}"), d.halfspaces(1))).collect();
    let radius = Rational::from_int(2);
    let lo: QVector = z.iter().map(|c| c - &radius).collect();
    let hi: QVector = z.iter().map(|c| c + &radius).collect();
    let robust_b = Some(Polyhedron::boxed(&lo, &hi)?);

    if f.force_increasing && !family.is_increasing()? {
        return Ok(None);
    }
    if f.force_epi_pointed {
        for (_, g) in family.members() {
            if g.is_epi_pointed()?.is_none() {
                return Ok(None);
            }
        }
    }
    if f.force_qc1 && !check_qc1(&family, &z)? {
        return Ok(None);
    }
    if f.force_qc2 && !check_qc2(&family, &z)? {
        return Ok(None);
    }
    if f.break_qc2 && check_qc2(&family, &z)? {
        return Ok(None);
    }
    Ok(Some(GeneratedInstance { family, sets, robust_b, point: z }))
}

/// Deterministic in `params`; every requested flag is audited on the result.
pub fn generate(params: &GeneratorParams) -> Result<GeneratedInstance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(inst) = attempt(params, &mut rng)? {
            return Ok(inst);
        }
    }
    Err(Error::Generation(format!(
        "flags {:?} not satisfied after {MAX_ATTEMPTS} attempts (dim {}, {} members, {:?} domains)",
        params.flags, params.dim, params.member_count, params.domain_kind
    )))
}
