mod common;

use cfrow::contraction::*;
use cfrow::exact_core::{int, Int, Rat};
use cfrow::farey_maps::farey_expansion;
use cfrow::gcf::*;
use cfrow::Error;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

fn ramp() -> GcfDigits {
    GcfDigits::lazy(|n| {
        Some(if n == 0 { Digit::new(int(1), int(1)) } else { Digit::new(int(n as i64), int(n as i64 + 1)) })
    })
}

#[test]
fn ramp_even_contraction() {
    let plan = ContractionPlan::arithmetic(0, 2, 8).unwrap();
    let c = contract(&ramp(), &plan).unwrap();
    let want = [(1, 1), (3, 8), (-30, 87), (-420, 275), (-1890, 623), (-5544, 1179), (-12870, 1991), (-25740, 3107)];
    assert_eq!(c, GcfDigits::from_pairs(&want));
    let cs = seidel_scalars(&ramp(), &plan, 6).unwrap();
    assert_eq!(cs, [1, 1, 3, 15, 105, 945, 10395].map(int).to_vec());
    assert!(seidel_check(&ramp(), &plan).unwrap());
}

#[test]
fn identity_plan_keeps_convergents() {
    let g = GcfDigits::rcf(int(0), &[2, 1, 4, 1, 3, 5].map(int));
    let plan = ContractionPlan::arithmetic(0, 1, 7).unwrap();
    assert!(seidel_check(&g, &plan).unwrap());
    assert_eq!(seidel_scalars(&g, &plan, 1).unwrap(), vec![int(1), int(1)]);
}

#[test]
fn length_three_plan_by_hand() {
    // g = [b0/a0; a1/b1, a2/b2]; plan (0, 2)
    let (a0, b0, a1, b1, a2, b2) = (2i64, 3, 5, 7, -4, 6);
    let g = GcfDigits::from_pairs(&[(a0, b0), (a1, b1), (a2, b2)]);
    let c = contract(&g, &ContractionPlan::new(vec![0, 2]).unwrap()).unwrap().to_vec(2);
    // first contracted digit reproduces β0/α0
    assert_eq!(c[0], (int(a0), int(b0)));
    // second: the two-step tail a1/(b1 + a2/b2) = a1 b2 / (b1 b2 + a2)
    let v0 = Rat::new(c[0].1.clone(), c[0].0.clone());
    let v1 = v0 + Rat::new(c[1].0.clone(), c[0].0.clone() * c[1].1.clone());
    let direct = Rat::new(int(b0), int(a0)) + Rat::new(int(a1 * b2), int(a0 * (b1 * b2 + a2)));
    assert_eq!(v1, direct);
    assert_eq!(c[1].1, int(b1 * b2 + a2));
}

#[test]
fn contractability() {
    let pos = GcfDigits::rcf(int(1), &[3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3, 8, 4, 6].map(int));
    assert_eq!(is_contractable(&pos, 20).unwrap(), Contractability::Contractable { depth: 20 });
    let x = common::random_surd(&mut common::rng(5));
    let f = farey_expansion(&x, 31).unwrap();
    assert_eq!(is_contractable(&f, 30).unwrap(), Contractability::Contractable { depth: 30 });
    // β1 = 0 makes Q_[1,1] vanish
    let bad = GcfDigits::from_pairs(&[(1, 0), (1, 0), (1, 1)]);
    assert_eq!(is_contractable(&bad, 2).unwrap(), Contractability::Fails { m: 1, n: 1 });
    assert!(matches!(contract(&bad, &ContractionPlan::new(vec![1, 2]).unwrap()), Err(Error::NotContractable(1, 1))));
    assert_eq!(ContractionPlan::new(vec![2, 2]), Err(Error::BadPlan));
}

/// c_k as a product of Q values read off explicit matrix products.
fn brute_scalars(g: &GcfDigits, plan: &[usize]) -> Vec<Int> {
    let n = |k: i64| if k < 0 { k } else { plan[k as usize] as i64 };
    let mut out = vec![int(1)];
    for j in 0..plan.len() as i64 {
        let q = partial_matrix(g, n(j - 1) + 2, n(j)).unwrap().d;
        out.push(out.last().unwrap() * q);
    }
    out
}

proptest! {
    #[test]
    fn seidel_on_random_positive_expansions(
        ds in prop::collection::vec((1i64..9, 1i64..9), 3..30),
        picks in prop::collection::vec(any::<bool>(), 30),
    ) {
        let g = GcfDigits::from_pairs(&ds);
        let mut plan: Vec<usize> = (0..ds.len()).filter(|&i| picks[i]).collect();
        if plan.is_empty() { plan.push(ds.len() - 1); }
        let p = ContractionPlan::new(plan.clone()).unwrap();
        prop_assert!(seidel_check(&g, &p).unwrap());
        prop_assert_eq!(seidel_scalars(&g, &p, plan.len()).unwrap(), brute_scalars(&g, &plan));
    }

    #[test]
    fn contracted_values_agree(ds in prop::collection::vec((prop_oneof![-5i64..-1, 1i64..6], 1i64..9), 2..16), seed in any::<u64>()) {
        let g = GcfDigits::from_pairs(&ds);
        prop_assume!(matches!(is_contractable(&g, ds.len() - 1).unwrap(), Contractability::Contractable { .. }));
        let mut r = common::rng(seed);
        let mut plan: Vec<usize> = (0..ds.len()).filter(|_| r.gen_bool(0.5)).collect();
        if plan.is_empty() { plan.push(0); }
        let p = ContractionPlan::new(plan.clone()).unwrap();
        let c = contract(&g, &p).unwrap();
        let a = all_convergents(&c).unwrap();
        let b = all_convergents(&g).unwrap();
        for (k, &nk) in plan.iter().enumerate() {
            let (pp, qp) = &a[k + 2];
            let (po, qo) = &b[nk + 2];
            prop_assert!(!qo.is_zero() || qp.is_zero());
            prop_assert_eq!(pp * qo, po * qp);
        }
    }
}
