use patalg::instances::{
    inversion_graph, sum_decomposition, Gr, Graph, MGr, MGrProduct, MPer, MarkedGraph, MarkedPermutation, Per,
    Permutation, SPart, SumKind,
};
use patalg::presheaf::brute_force_factor_pairs;
use patalg::Presheaf;
use proptest::prelude::*;

fn perms_upto(n: usize) -> Vec<Permutation> {
    Per::new().enumerate_upto(n).unwrap()
}

fn mperms_upto(n: usize) -> Vec<MarkedPermutation> {
    MPer::new().enumerate_upto(n).unwrap()
}

fn bar() -> MarkedPermutation {
    MarkedPermutation::unit()
}

#[test]
fn direct_sums_are_associative_with_empty_unit() {
    let ps = perms_upto(3);
    let e = Permutation::empty();
    for a in &ps {
        assert_eq!(&a.oplus(&e), a);
        assert_eq!(&e.oplus(a), a);
        assert_eq!(&a.ominus(&e), a);
        assert_eq!(&e.ominus(a), a);
        for b in &ps {
            for c in &ps {
                assert_eq!(a.oplus(b).oplus(c), a.oplus(&b.oplus(c)));
                assert_eq!(a.ominus(b).ominus(c), a.ominus(&b.ominus(c)));
            }
        }
    }
}

#[test]
fn inflation_is_associative_with_unit() {
    let ms = mperms_upto(2);
    for a in &ms {
        assert_eq!(&a.inflate(&bar()), a);
        assert_eq!(&bar().inflate(a), a);
        for b in &ms {
            for c in &ms {
                assert_eq!(a.inflate(b).inflate(c), a.inflate(&b.inflate(c)));
            }
        }
    }
}

#[test]
fn inflation_cancels() {
    let ms = mperms_upto(2);
    for p in &ms {
        for t in &ms {
            for s in &ms {
                if p.inflate(t) == p.inflate(s) {
                    assert_eq!(t, s);
                }
                if t.inflate(p) == s.inflate(p) {
                    assert_eq!(t, s);
                }
            }
        }
    }
}

#[test]
fn oplus_and_ominus_relations() {
    let ps: Vec<Permutation> = perms_upto(3).into_iter().filter(|p| !p.is_empty()).collect();
    let one = Permutation::identity(1);
    for t1 in ps.iter().filter(|p| p.is_oplus_indecomposable()) {
        for t2 in ps.iter().filter(|p| p.is_oplus_indecomposable()) {
            let l = bar().oplus_right(t1); // 1̄ ⊕ τ₁
            let r = bar().oplus_left(t2); // τ₂ ⊕ 1̄
            let both = bar().oplus_left(t2).oplus_right(t1);
            assert_eq!(l.inflate(&r), both);
            assert_eq!(r.inflate(&l), both);
            assert_eq!(both.underlying(), t2.oplus(&one).oplus(t1));
        }
    }
    for t1 in ps.iter().filter(|p| p.is_ominus_indecomposable()) {
        for t2 in ps.iter().filter(|p| p.is_ominus_indecomposable()) {
            let l = bar().ominus_right(t1);
            let r = bar().ominus_left(t2);
            let both = bar().ominus_left(t2).ominus_right(t1);
            assert_eq!(l.inflate(&r), both);
            assert_eq!(r.inflate(&l), both);
            assert_eq!(both.underlying(), t2.ominus(&one).ominus(t1));
        }
    }
}

#[test]
fn inversion_graph_turns_oplus_into_disjoint_union() {
    let gr = Gr::new();
    let ps = perms_upto(4);
    for p in &ps {
        for t in &ps {
            let lhs = inversion_graph(&p.oplus(t));
            let rhs = gr.canonical(&inversion_graph(p).disjoint_union(&inversion_graph(t)));
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn inversion_graph_commutes_with_restriction() {
    let per = Per::new();
    let gr = Gr::new();
    for p in perms_upto(5) {
        // inversion graph on positions, before canonicalization
        let n = p.len();
        let raw = Graph::new(n, &p.inversions().collect::<Vec<_>>()).unwrap();
        for j in 0..(1u32 << n) {
            assert_eq!(gr.restrict_mask(&raw, j), inversion_graph(&per.restrict_mask(&p, j)));
        }
    }
}

#[test]
fn vee_and_disjoint_union_commute_and_associate() {
    let gr = Gr::new();
    let gs = gr.enumerate_upto(3).unwrap();
    for a in &gs {
        for b in &gs {
            assert_eq!(gr.product(a, b).unwrap(), gr.product(b, a).unwrap());
            for c in &gs {
                let l = gr.product(&gr.product(a, b).unwrap(), c).unwrap();
                let r = gr.product(a, &gr.product(b, c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
    let mgr = MGr::new(MGrProduct::Vee);
    let ms = mgr.enumerate_upto(3).unwrap();
    for a in &ms {
        for b in &ms {
            assert_eq!(mgr.product(a, b).unwrap(), mgr.product(b, a).unwrap());
            for c in &ms {
                let l = mgr.product(&mgr.product(a, b).unwrap(), c).unwrap();
                let r = mgr.product(a, &mgr.product(b, c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
    let sp = SPart::new();
    let ss = sp.enumerate_upto(3).unwrap();
    for a in &ss {
        for b in &ss {
            assert_eq!(sp.product(a, b).unwrap(), sp.product(b, a).unwrap());
            for c in &ss {
                let l = sp.product(&sp.product(a, b).unwrap(), c).unwrap();
                let r = sp.product(a, &sp.product(b, c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
fn star_is_associative_but_not_commutative() {
    let mgr = MGr::new(MGrProduct::Star);
    let ms = mgr.enumerate_upto(2).unwrap();
    let mut noncommuting = 0;
    for a in &ms {
        for b in &ms {
            if mgr.product(a, b).unwrap() != mgr.product(b, a).unwrap() {
                noncommuting += 1;
            }
            for c in &ms {
                let l = mgr.product(&mgr.product(a, b).unwrap(), c).unwrap();
                let r = mgr.product(a, &mgr.product(b, c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
    assert!(noncommuting > 0);
}

#[test]
fn graph_irreducibles_are_connected_graphs() {
    let gr = Gr::new();
    for g in gr.enumerate_upto(5).unwrap() {
        if g.order() == 0 {
            continue;
        }
        let f = gr.irreducible_factors(&g).unwrap();
        assert_eq!(f.len() == 1, g.is_connected(), "{g}");
        assert_eq!(gr.is_irreducible(&g).unwrap(), g.is_connected());
        let back = f.iter().fold(gr.unit(), |acc, x| gr.product(&acc, x).unwrap());
        assert_eq!(back, g);
        assert!(f.iter().all(Graph::is_connected));
    }
}

#[test]
fn marked_graph_vee_irreducibles() {
    let mgr = MGr::new(MGrProduct::Vee);
    for g in mgr.enumerate_upto(4).unwrap() {
        if g.size() == 0 {
            continue;
        }
        assert_eq!(mgr.is_irreducible(&g).unwrap(), g.without_mark().is_connected(), "{g}");
        // the generic search agrees with the component split
        let fast = mgr.factor_pairs(&g).unwrap();
        assert_eq!(fast, brute_force_factor_pairs(&mgr, &g).unwrap());
    }
    for g in mgr.enumerate_upto(5).unwrap() {
        let f = mgr.irreducible_factors(&g).unwrap();
        let back = f.iter().fold(mgr.unit(), |acc, x| mgr.product(&acc, x).unwrap());
        assert_eq!(back, g);
    }
}

#[test]
fn set_partition_factors_reassemble() {
    let sp = SPart::new();
    for s in sp.enumerate_upto(5).unwrap() {
        let f = sp.irreducible_factors(&s).unwrap();
        assert_eq!(f.len(), s.shape().len());
        let back = f.iter().fold(sp.unit(), |acc, x| sp.product(&acc, x).unwrap());
        assert_eq!(back, s);
    }
    for n in 1..=6 {
        assert_eq!(sp.enumerate(n).unwrap().iter().filter(|s| sp.is_irreducible(s).unwrap()).count(), 1);
    }
}

#[test]
fn star_has_a_relation_in_total_size_three() {
    let mgr = MGr::new(MGrProduct::Star);
    let (u, v) = mgr.star_relation_witness(3).unwrap().expect("witness");
    assert_ne!(u, v);
    let prod = |w: &[MarkedGraph]| w.iter().fold(mgr.unit(), |acc, x| mgr.product(&acc, x).unwrap());
    assert_eq!(prod(&u), prod(&v));
    assert!(u.iter().chain(&v).all(|x| mgr.is_irreducible(x).unwrap()));
}

#[test]
fn per_factor_pairs_match_brute_force() {
    let per = Per::new();
    for p in per.enumerate_upto(5).unwrap() {
        assert_eq!(per.factor_pairs(&p).unwrap(), brute_force_factor_pairs(&per, &p).unwrap());
    }
    let mper = MPer::new();
    for a in mper.enumerate_upto(3).unwrap() {
        assert_eq!(mper.factor_pairs(&a).unwrap(), brute_force_factor_pairs(&mper, &a).unwrap());
    }
}

fn arb_mper(max: usize) -> impl Strategy<Value = MarkedPermutation> {
    (0..=max).prop_flat_map(|n| {
        (Just((1..=(n as u8 + 1)).collect::<Vec<u8>>()).prop_shuffle(), 0..=n)
            .prop_map(|(v, m)| MarkedPermutation::new(v, m).unwrap())
    })
}

proptest! {
    #[test]
    fn sum_decompositions_reassemble(a in arb_mper(7)) {
        for kind in [SumKind::Oplus, SumKind::Ominus] {
            let d = sum_decomposition(&a, kind);
            prop_assert_eq!(d.reassemble(), a.clone());
            // peeled summands are indecomposable and the core is not decomposable further
            for p in d.epsilons.iter().chain(&d.lambdas) {
                match kind {
                    SumKind::Oplus => prop_assert!(p.is_oplus_indecomposable()),
                    SumKind::Ominus => prop_assert!(p.is_ominus_indecomposable()),
                }
            }
            prop_assert_eq!(sum_decomposition(&d.core, kind).q(), 0);
        }
    }

    #[test]
    fn complement_is_an_involution(a in arb_mper(7)) {
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.is_oplus_decomposable(), a.complement().is_ominus_decomposable());
    }

    #[test]
    fn inflation_size_adds(a in arb_mper(4), b in arb_mper(4)) {
        let c = a.inflate(&b);
        prop_assert_eq!(c.size(), a.size() + b.size());
        let mper = MPer::new();
        prop_assert!(mper.factor_pairs(&c).unwrap().contains(&(a.clone(), b.clone())));
    }

    #[test]
    fn oplus_blocks_reassemble(v in Just((1..=7u8).collect::<Vec<u8>>()).prop_shuffle()) {
        let p = Permutation::new(v).unwrap();
        let blocks = p.oplus_blocks();
        prop_assert!(blocks.iter().all(Permutation::is_oplus_indecomposable));
        let back = blocks.iter().fold(Permutation::empty(), |acc, b| acc.oplus(b));
        prop_assert_eq!(back, p.clone());
        let ob = p.ominus_blocks();
        let back = ob.iter().fold(Permutation::empty(), |acc, b| acc.ominus(b));
        prop_assert_eq!(back, p);
    }
}
