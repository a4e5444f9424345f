mod common;

use cfrow::exact_core::{int, Int, Quad};
use cfrow::farey_maps::cf_value;
use cfrow::induced::induced_orbit;
use cfrow::natural_extensions::{OmegaPoint, XState, YState};
use cfrow::region_catalog::*;
use cfrow::shift_space::*;
use cfrow::Error;
use num_traits::{One, Zero};

const CAP: u64 = 100_000;

#[test]
fn h1_coordinates() {
    let x = common::random_surd(&mut common::rng(1));
    let t = Quad::sqrt_int(3).unwrap().add_int(&int(-1));
    let y = t.add_int(&Int::one()).recip().unwrap();
    let z = OmegaPoint::new(&x, &y).unwrap();
    let w = phi(&region_h1(), &z, CAP).unwrap();
    assert_eq!((w.x.clone(), w.y.clone()), (x, t));
    assert!(phi_inverse(&w).unwrap().same_point(&z));
}

#[test]
fn alpha_coordinates_on_golden_orbit() {
    let r = parse_region("alpha:1/2").unwrap();
    let g = Quad::golden_frac();
    let orbit = induced_orbit(&r, &OmegaPoint::on_top_edge(&g).unwrap(), 3, CAP).unwrap();
    let z = orbit.point(2);
    let w = phi(&r, z, CAP).unwrap();
    assert_eq!(w.x, g.add_int(&int(-1)));
    assert_eq!(w.y, Quad::one().checked_sub(&z.y_value()).unwrap());
}

#[test]
fn fixed_ray() {
    let w = ShiftPoint { x: Quad::zero(), y: Quad::rational(cfrow::exact_core::rat(1, 3)), origin: None };
    let v = tau_step(&region_h1(), &w, CAP).unwrap();
    assert_eq!((v.x, v.y), (w.x.clone(), w.y.clone()));
    assert!(matches!(phi_inverse(&w), Err(Error::FixedRay)));
}

#[test]
fn non_unit_regions_are_rejected() {
    let x = common::random_periodic(&mut common::rng(2), &[3]);
    let r = parse_region("h:2").unwrap();
    let orbit = induced_orbit(&r, &OmegaPoint::on_top_edge(&x).unwrap(), 6, CAP).unwrap();
    let any_err = (0..6).any(|k| matches!(phi(&r, orbit.point(k), CAP), Err(Error::NotUnitDenominator(_))));
    assert!(any_err);
}

#[test]
fn round_trip_and_shift() {
    let mut rng = common::rng(3);
    for spec in ["h1", "alpha:1/2", "alpha:3/10", "alpha:sqrt(2)-1"] {
        let r = parse_region(spec).unwrap();
        let alpha = if spec == "h1" { Quad::one() } else { cfrow::farey_maps::parse_real(&spec[6..]).unwrap() };
        for _ in 0..25 {
            let x = common::random_periodic(&mut rng, &[2]);
            let orbit = induced_orbit(&r, &OmegaPoint::on_top_edge(&x).unwrap(), 3, CAP).unwrap();
            let z = orbit.point(2);
            let w = phi(&r, z, CAP).unwrap();
            assert!(phi_inverse(&w).unwrap().same_point(z));
            let mut cur = w;
            for _ in 0..10 {
                let (_, _, gx) = common::g_alpha_oracle(&alpha, &cur.x);
                cur = tau_step(&r, &cur, CAP).unwrap();
                assert_eq!(cur.x, gx, "region {spec}");
            }
        }
    }
}

#[test]
fn bilateral_strings_shift() {
    let r = parse_region("alpha:1/3").unwrap();
    let x = common::random_periodic(&mut common::rng(4), &[1, 2]);
    let orbit = induced_orbit(&r, &OmegaPoint::on_top_edge(&x).unwrap(), 8, CAP).unwrap();
    let (p0, f0) = bilateral_digits(&r, orbit.point(5), 3, 6, CAP).unwrap();
    let (p1, f1) = bilateral_digits(&r, orbit.point(6), 4, 5, CAP).unwrap();
    assert_eq!(f1, f0[1..].to_vec());
    assert_eq!(p1[0], f0[0]);
    assert_eq!(p1[1..], p0[..3]);
    // the walk back stops at (x, 1)
    let (p, _) = bilateral_digits(&r, orbit.point(2), 10, 1, CAP).unwrap();
    assert_eq!(p.len(), 2);
}

#[test]
fn periodic_points_have_periodic_strings() {
    // x = [0; (a1..ap)], y = [0; 1, (ap..a1)] is fixed by p steps of the H1 map
    let period = [int(3), int(1), int(4)];
    let rev: Vec<Int> = period.iter().rev().cloned().collect();
    let x = cf_value(&[Int::zero()], &period).unwrap();
    let t = cf_value(&[Int::zero()], &rev).unwrap();
    let z = OmegaPoint::from_states(XState::from_value(&x).unwrap(), YState::from_digits(&[Int::one()], t));
    let (past, future) = bilateral_digits(&region_h1(), &z, 9, 9, CAP).unwrap();
    for k in 0..6 {
        assert_eq!(future[k], future[k + 3]);
        assert_eq!(past[k], past[k + 3]);
    }
    assert_eq!(future[..3], [(int(1), int(3)), (int(1), int(1)), (int(1), int(4))]);
    assert_eq!(past[..3], [(int(1), int(4)), (int(1), int(1)), (int(1), int(3))]);
}
