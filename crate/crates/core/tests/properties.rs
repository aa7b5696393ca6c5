use proptest::prelude::*;

use supcalc::function::{eps_normal_set, AffinePiece, PolyhedralFunction};
use supcalc::generate::{generate, DomainKind, GeneratorParams};
use supcalc::lp::{Constraint, LinearProgram};
use supcalc::oracles::{enumerate_polyhedron, grid_legendre, GridSpec};
use supcalc::rational::{q, qi, ExtendedRational, Rational};
use supcalc::report::CheckStatus;
use supcalc::sup::{check_identity, decompose, CheckInstance, CheckParams, DecompositionMode, FunctionFamily, Identity};
use supcalc::{cco_union, minkowski_sum, HalfSpace, Polyhedron, QVector, Sense};

fn ints(n: usize, r: i64) -> impl Strategy<Value = QVector> {
    prop::collection::vec(-r..=r, n).prop_map(|v| QVector::from_ints(&v))
}

/// Polyhedra containing the origin: random rows with nonnegative offsets.
fn polyhedron(n: usize) -> impl Strategy<Value = Polyhedron> {
    prop::collection::vec((ints(n, 3), 0i64..=4), 1..=5).prop_map(move |rows| {
        let hs = rows.into_iter().filter(|(a, _)| !a.is_zero()).map(|(a, b)| HalfSpace::new(a, qi(b))).collect();
        Polyhedron::new(n, hs, vec![]).unwrap()
    })
}

fn polytope(n: usize) -> impl Strategy<Value = Polyhedron> {
    prop::collection::vec(ints(n, 3), 1..=5).prop_map(move |pts| Polyhedron::from_generators(n, pts, vec![], vec![]).unwrap())
}

const BOX: i64 = 3;

/// Max-affine functions on a box around the origin.
fn function(n: usize) -> impl Strategy<Value = PolyhedralFunction> {
    (prop::collection::vec((ints(n, 3), -3i64..=3), 1..=4), prop::collection::vec(1i64..=BOX, 2 * n)).prop_map(move |(ps, bounds)| {
        let pieces = ps.into_iter().map(|(a, b)| AffinePiece::new(a, qi(b))).collect();
        let lo = QVector::new((0..n).map(|i| qi(-bounds[i])).collect());
        let hi = QVector::new((0..n).map(|i| qi(bounds[n + i])).collect());
        PolyhedralFunction::new(n, pieces, Polyhedron::boxed(&lo, &hi).unwrap()).unwrap()
    })
}

fn in_box(n: usize) -> impl Strategy<Value = QVector> {
    prop::collection::vec(-2i64..=2, n).prop_map(|v| QVector::new(v.into_iter().map(|k| q(k, 2)).collect()))
}

fn family(n: usize) -> impl Strategy<Value = FunctionFamily> {
    prop::collection::vec(function(n), 1..=3).prop_map(|fs| {
        FunctionFamily::new(fs.into_iter().enumerate().map(|(i, f)| (format!("f{i}"), f)).collect(), None).unwrap()
    })
}

fn own_support(p: &Polyhedron, d: &QVector) -> ExtendedRational {
    let e = enumerate_polyhedron(p).unwrap();
    if e.lines.iter().any(|l| !d.dot(l).is_zero()) || e.rays.iter().any(|r| d.dot(r).is_positive()) {
        return ExtendedRational::PosInfinity;
    }
    e.points.iter().map(|v| ExtendedRational::Finite(d.dot(v))).max().unwrap_or(ExtendedRational::NegInfinity)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn dd_round_trip(p in polyhedron(3)) {
        let g = p.generators().unwrap().clone();
        let back = Polyhedron::from_generators(3, g.points, g.rays, g.lines).unwrap();
        prop_assert!(p.equals(&back).unwrap());
    }

    #[test]
    fn lp_strong_duality(p in polyhedron(2), c in ints(2, 3)) {
        let cons: Vec<Constraint> = p.ineqs().iter().map(|h| Constraint::le(h.normal.clone(), h.offset.clone())).collect();
        let lp = LinearProgram::new(c.clone(), cons, Sense::Maximize);
        let res = lp.solve().unwrap();
        prop_assert!(lp.verify(&res));
        prop_assert_eq!(res.optimum, p.support(&c).unwrap());
    }

    #[test]
    fn cco_union_matches_support_oracle(a in polytope(2), b in polytope(2), dirs in prop::collection::vec(ints(2, 4), 8)) {
        let h = cco_union(&[a.clone(), b.clone()]).unwrap();
        prop_assert!(a.is_subset_of(&h).unwrap().holds());
        prop_assert!(b.is_subset_of(&h).unwrap().holds());
        for d in dirs {
            prop_assert_eq!(h.support(&d).unwrap(), own_support(&a, &d).max(own_support(&b, &d)));
        }
    }

    #[test]
    fn recession_of_minkowski_sum(a in polytope(2), b in polytope(2), r in prop::collection::vec(ints(2, 2), 0..=2), s in prop::collection::vec(ints(2, 2), 0..=2)) {
        let ga = a.generators().unwrap();
        let gb = b.generators().unwrap();
        let p = Polyhedron::from_generators(2, ga.points.clone(), r.clone(), vec![]).unwrap();
        let qq = Polyhedron::from_generators(2, gb.points.clone(), s.clone(), vec![]).unwrap();
        let lhs = minkowski_sum(&p, &qq).unwrap().recession_cone().unwrap();
        let rhs = minkowski_sum(&p.recession_cone().unwrap(), &qq.recession_cone().unwrap()).unwrap();
        prop_assert!(lhs.equals(&rhs).unwrap());
    }

    #[test]
    fn fenchel_young(f in function(2), x in in_box(2), y in ints(2, 3)) {
        let fx = f.eval(&x);
        prop_assume!(fx.is_finite());
        let lhs = f.conjugate_eval(&y).unwrap().add_finite(fx.finite().unwrap());
        let inner = ExtendedRational::Finite(x.dot(&y));
        prop_assert!(lhs >= inner);
        let sub = f.eps_subdifferential(&x, &qi(0)).unwrap();
        prop_assert_eq!(lhs == inner, sub.contains(&y));
    }

    #[test]
    fn eps_subdifferential_monotone_and_exact(f in function(2), x in in_box(2), e in 0i64..=4, de in 1i64..=4) {
        prop_assume!(f.eval(&x).is_finite());
        let (e1, e2) = (q(e, 4), q(e + de, 4));
        let s1 = f.eps_subdifferential(&x, &e1).unwrap();
        let s2 = f.eps_subdifferential(&x, &e2).unwrap();
        prop_assert!(s1.is_subset_of(&s2).unwrap().holds());
        let n = eps_normal_set(f.domain(), &x, &qi(0)).unwrap();
        prop_assert!(s1.recession_cone().unwrap().equals(&n).unwrap());
    }

    #[test]
    fn biconjugate_and_recession(f in function(2)) {
        prop_assert!(f.biconjugate().unwrap().equals(&f).unwrap());
        let r = f.recession_function().unwrap();
        prop_assert!(r.epigraph().equals(&f.epigraph().recession_cone().unwrap()).unwrap());
    }

    #[test]
    fn sup_contains_active_member_subdifferentials(fam in family(2), x in in_box(2), e in 0i64..=2) {
        let sup = fam.sup_function();
        prop_assume!(sup.eval(&x).is_finite());
        let eps = q(e, 2);
        let s = sup.eps_subdifferential(&x, &eps).unwrap();
        for label in fam.active_indices(&x, &Rational::zero()).unwrap() {
            let t = fam.index_of(&label).unwrap();
            prop_assert!(fam.member(t).eps_subdifferential(&x, &eps).unwrap().is_subset_of(&s).unwrap().holds());
        }
    }

    #[test]
    fn decompositions_reconstruct(fam in family(2), x in in_box(2), e in 0i64..=2) {
        let sup = fam.sup_function();
        prop_assume!(sup.eval(&x).is_finite());
        let eps = q(e, 3);
        let s = sup.eps_subdifferential(&x, &eps).unwrap();
        for v in s.vertices().unwrap() {
            let w = decompose(&fam, &x, &eps, &v, DecompositionMode::T53, &qi(0)).unwrap().expect("finite families always decompose");
            let recon = w.scaled_points.values().fold(QVector::zeros(2), |acc, y| acc.add(y)).add(&w.normal_part);
            prop_assert_eq!(recon, v.clone());
            prop_assert!(w.verify(&fam, &x, &v, &eps).unwrap().holds());
        }
    }

    #[test]
    fn affine_equivariance(fam in family(2), x in in_box(2), c in ints(2, 2)) {
        let sup = fam.sup_function();
        prop_assume!(sup.eval(&x).is_finite());
        let shifted = fam.add_linear(&c).unwrap();
        let eps = q(1, 3);
        let s = sup.eps_subdifferential(&x, &eps).unwrap();
        let t = shifted.sup_function().eps_subdifferential(&x, &eps).unwrap();
        prop_assert!(s.translate(&c).unwrap().equals(&t).unwrap());
        let params = CheckParams { x: Some(x.clone()), eps, ..CheckParams::default() };
        for id in [Identity::L2A, Identity::L2B, Identity::P34, Identity::T53, Identity::C46] {
            let a = check_identity(id, &CheckInstance::new(fam.clone()), &params).unwrap().status;
            let b = check_identity(id, &CheckInstance::new(shifted.clone()), &params).unwrap().status;
            prop_assert_eq!(a, b);
            prop_assert_ne!(a, CheckStatus::Fail);
        }
    }

    #[test]
    fn grid_legendre_is_a_monotone_lower_bound(f in function(2), y in ints(2, 3)) {
        let exact = f.conjugate_eval(&y).unwrap();
        let mut prev: Option<Rational> = None;
        for k in [1, 2, 4] {
            let g = GridSpec::cube(&QVector::zeros(2), &qi(BOX), q(1, k)).unwrap();
            let v = grid_legendre(&f, &g, &y).unwrap();
            prop_assert!(ExtendedRational::Finite(v.clone()) <= exact);
            if let Some(p) = prev {
                prop_assert!(v >= p);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn generation_is_pure(seed in any::<u64>(), dim in 1usize..=3, m in 1usize..=4) {
        let p = GeneratorParams::new(dim, m, 3, DomainKind::Halfspaces, seed);
        let a = serde_json::to_string(&generate(&p).unwrap().family).unwrap();
        let b = serde_json::to_string(&generate(&p).unwrap().family).unwrap();
        prop_assert_eq!(a, b);
    }
}
