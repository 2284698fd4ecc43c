use sts_human::*;
use sts_kinematics::GRAVITY;

#[test]
fn min_jerk_profile() {
    assert_eq!(min_jerk(0.0), (0.0, 0.0, 0.0));
    assert_eq!(min_jerk(1.0), (1.0, 0.0, 0.0));
    let (s, v, a) = min_jerk(0.5);
    assert!((s - 0.5).abs() < 1e-15);
    assert!((v - 1.875).abs() < 1e-12);
    assert!(a.abs() < 1e-12);
    let mut prev = 0.0;
    for i in 1..1000 {
        let t = i as f64 / 1000.0;
        let (s, v, a) = min_jerk(t);
        assert!(s >= prev && v <= 1.875 + 1e-12);
        prev = s;
        let h = 1e-6;
        let dv = (min_jerk(t + h).0 - min_jerk(t - h).0) / (2.0 * h);
        let da = (min_jerk(t + h).1 - min_jerk(t - h).1) / (2.0 * h);
        assert!((dv - v).abs() < 1e-6 && (da - a).abs() < 1e-5);
    }
}

#[test]
fn reference_spans_seated_to_standing() {
    let p = HumanParams::for_user(1.75, 80.0);
    let r = StsReference { duration: 2.0 };
    assert_eq!(reference_com(&p, &r, 0.0).pos, p.seated_com);
    let end = reference_com(&p, &r, 2.0);
    assert!((end.pos[0] - p.standing_com[0]).abs() < 1e-12 && (end.pos[1] - p.standing_com[1]).abs() < 1e-12);
    let mid = reference_com(&p, &r, 1.0);
    let dz = p.standing_com[1] - p.seated_com[1];
    assert!((mid.vel[1] - 1.875 * dz / 2.0).abs() < 1e-12);
}

#[test]
fn chair_support_tapers_over_the_edge() {
    let p = HumanParams::for_user(1.75, 80.0);
    let edge = p.seat_edge();
    assert_eq!(p.chair_support(p.seated_com[0]), 1.0);
    assert_eq!(p.chair_support(edge), 0.0);
    assert!((p.chair_support(edge - p.edge_taper / 2.0) - 0.5).abs() < 1e-12);
    assert_eq!(p.chair_support(edge + 0.1), 0.0);
}

#[test]
fn seated_rest_is_in_equilibrium() {
    let p = HumanParams::for_user(1.75, 80.0);
    let s = HumanState::seated(&p);
    let f = contact_forces(&p, &s, &seated_reference(&p), [0.0, 0.0]);
    let a = acceleration(&p, &f, [0.0, 0.0]);
    assert!(a[0].abs() < 1e-9 && a[1].abs() < 1e-9, "{a:?}");
    assert!((f.feet[1] - p.seated_feet_share * p.weight()).abs() < 1e-9);
    assert!((f.chair_fz - (1.0 - p.seated_feet_share) * p.weight()).abs() < 1e-9);
}

#[test]
fn felt_support_reduces_leg_effort() {
    let p = HumanParams::for_user(1.75, 80.0);
    let s = HumanState::seated(&p);
    let r = seated_reference(&p);
    let free = contact_forces(&p, &s, &r, [0.0, 0.0]);
    let helped = contact_forces(&p, &s, &r, [0.0, 50.0]);
    assert!((free.feet[1] - helped.feet[1] - 50.0).abs() < 1e-9);
    let none = HumanParams { support_adaptation: 0.0, ..p.clone() };
    let f = contact_forces(&none, &s, &r, [0.0, 50.0]);
    assert!((f.feet[1] - free.feet[1]).abs() < 1e-9);
}

#[test]
fn feet_never_pull_and_capacity_binds() {
    let p = HumanParams::for_user(1.75, 80.0);
    let s = HumanState::seated(&p);
    let (f, _) = muscle_effort(&p, &s, &seated_reference(&p), 5000.0);
    assert_eq!(f[1], 0.0);
    let far = ReferencePoint { pos: [p.seated_com[0] + 2.0, p.seated_com[1] + 2.0], ..Default::default() };
    let (f, sat) = muscle_effort(&p, &s, &far, 0.0);
    assert!(sat);
    assert!((f[0].hypot(f[1]) - p.capacity_factor * p.weight()).abs() < 1e-6);
    let weak = HumanParams { mobility: 0.0, ..p.clone() };
    assert_eq!(muscle_effort(&weak, &s, &far, 0.0).0, [0.0, 0.0]);
}

#[test]
fn seat_off_latches_and_sit_back_triggers() {
    let p = HumanParams::for_user(1.75, 80.0);
    let mut s = HumanState::seated(&p);
    let loaded = HumanForces { chair_fz: 100.0, feet: [0.0, 0.0], effort_saturated: false };
    update_events(&p, &mut s, &loaded, true, 1e-3);
    assert!(!s.seat_off);
    let off = HumanForces { chair_fz: 0.0, ..loaded };
    update_events(&p, &mut s, &off, false, 1e-3);
    assert!(!s.seat_off, "no seat-off outside the rise");
    update_events(&p, &mut s, &off, true, 1e-3);
    assert!(s.seat_off);
    s.com[1] = 0.0;
    assert_eq!(chair_force(&p, &s), 0.0);

    let mut s = HumanState::seated(&p);
    let strained = HumanForces { effort_saturated: true, ..loaded };
    for _ in 0..190 {
        update_events(&p, &mut s, &strained, true, 1e-3);
    }
    assert!(!s.sat_back);
    for _ in 0..20 {
        update_events(&p, &mut s, &strained, true, 1e-3);
    }
    assert!(s.sat_back);
}

#[test]
fn harness_action_reaction() {
    let h = HarnessParams::default();
    let e = [0.30, 1.10];
    let a = [0.28, 1.05];
    let on_human = harness_force(&h, e, [0.1, 0.0], a, [0.0, 0.2]);
    let reversed = harness_force(&h, a, [0.0, 0.2], e, [0.1, 0.0]);
    assert!((on_human[0] + reversed[0]).abs() < 1e-12 && (on_human[1] + reversed[1]).abs() < 1e-12);
    assert!((on_human[0] - (2.0e4 * 0.02 + 200.0 * 0.1)).abs() < 1e-9);
    assert!((on_human[1] - (2.0e4 * 0.05 - 200.0 * 0.2)).abs() < 1e-9);
}

#[test]
fn assistance_from_force_plates() {
    let m = 80.0;
    let w = m * GRAVITY;
    let chair = vec![0.5 * w; 4];
    let feet = vec![0.4 * w; 4];
    assert!((grf_fraction(&chair, &feet, m).unwrap() - 0.9).abs() < 1e-12);
    assert!((measured_assistance(&chair, &feet, m).unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(measured_assistance(&[], &[], m), Err(AssistanceError::EmptyWindow));
    let nm = nested_mean(&[vec![0.1, 0.3], vec![0.5], vec![]]).unwrap();
    assert!((nm - 0.35).abs() < 1e-12);
    assert_eq!(nested_mean(&[]), None);
}

#[test]
fn parameter_validation() {
    let p = HumanParams::for_user(1.75, 80.0);
    assert!(p.validate().is_ok());
    assert!(HumanParams { mass: 0.0, ..p.clone() }.validate().is_err());
    assert!(HumanParams { mobility: 1.5, ..p.clone() }.validate().is_err());
    assert!(HumanParams { edge_taper: 0.3, ..p.clone() }.validate().is_err());
    assert!(HumanParams { standing_com: p.seated_com, ..p.clone() }.validate().is_err());
}
