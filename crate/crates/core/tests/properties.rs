use num_bigint::BigInt;
use partible::certificate::CertificateJson;
use partible::harness::{hypothesis_holds, verify_via_certificate, weighted_sum, weighted_sum_mod};
use partible::modular::{is_prime, odd_primes_below};
use partible::poly::{int, KPoly};
use partible::reduction::{schroder_certificate, verify_certificate};
use partible::sequences::{
    large_schroder, large_schroder_at, little_schroder_at, schroder_operator, schroder_table,
    seq_by_recurrence, Family, SchroderFamily, SequenceSpec, ZValue,
};
use partible::shift::{op_adjoint_apply, op_find_gamma, Epsilon, OperatorSpec};
use partible::text::parse_kpoly;
use proptest::prelude::*;

fn epsilon() -> impl Strategy<Value = Epsilon> {
    prop_oneof![Just(Epsilon::Minus), Just(Epsilon::Plus)]
}

fn admissible_point() -> impl Strategy<Value = (u64, i64)> {
    (prop::sample::select(odd_primes_below(150)), -40i64..40)
        .prop_filter("gcd(p, z(z+1)) = 1", |&(p, z)| hypothesis_holds(p, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn congruences_hold((p, z) in admissible_point(), r in 0u32..6, eps in epsilon()) {
        prop_assert_eq!(weighted_sum_mod(SchroderFamily::Large, r, eps, z, p, true).unwrap().residue(), 1);
        prop_assert_eq!(weighted_sum_mod(SchroderFamily::Little, r, eps, z, p, true).unwrap().residue(), 0);
    }

    #[test]
    fn certificate_path_agrees((p, z) in admissible_point(), r in 0u32..5, eps in epsilon()) {
        prop_assert!(verify_via_certificate(r, eps, z, p).unwrap());
    }

    #[test]
    fn table_matches_definition(z in -8i64..8, n in 0usize..60) {
        let zb = BigInt::from(z);
        let large = schroder_table(SchroderFamily::Large, z, n.max(1));
        let little = schroder_table(SchroderFamily::Little, z, n.max(1));
        prop_assert_eq!(&large[n], &large_schroder_at(n, &zb));
        prop_assert_eq!(&little[n], &little_schroder_at(n, &zb));
        // (z+1) s_n = S_n
        prop_assert_eq!(&little[n] * (z + 1) + if n == 0 { 1 } else { 0 }, large[n].clone());
    }

    #[test]
    fn adjoint_is_linear(a in -5i64..5, b in -5i64..5, eps in epsilon()) {
        let op = schroder_operator(eps);
        let x = parse_kpoly("k^2 + 3*k").unwrap();
        let y = parse_kpoly("2*k^3 - z*k + 1").unwrap();
        let a = KPoly::constant(partible::ZPoly::constant(int(a)));
        let b = KPoly::constant(partible::ZPoly::constant(int(b)));
        let lhs = op_adjoint_apply(&op, &(a.clone() * &x + &(b.clone() * &y)));
        let rhs = a * &op_adjoint_apply(&op, &x) + &(b * &op_adjoint_apply(&op, &y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn specialized_certificates_verify(r in 0u32..6, z in -12i64..12, eps in epsilon()) {
        let cert = schroder_certificate(r, eps).unwrap();
        match cert.specialize(z) {
            Ok(spec) => prop_assert!(verify_certificate(&spec, &schroder_operator(eps).at_z(&int(z)))),
            Err(e) => {
                prop_assert_eq!(partible::sequences::eta_at(eps, z), 0);
                let is_degenerate = matches!(e, partible::Error::DegenerateSpecialization { .. });
                prop_assert!(is_degenerate);
            }
        }
    }
}

#[test]
fn recurrence_generators_agree_with_definition() {
    for z in -5..=5 {
        for eps in Epsilon::BOTH {
            let spec = SequenceSpec { family: Family::LargeSchroder, z: ZValue::Int(z), epsilon: eps };
            let vals = seq_by_recurrence(&spec, 200).unwrap();
            let zb = BigInt::from(z);
            for (n, v) in vals.iter().enumerate() {
                let want = large_schroder_at(n, &zb) * eps.pow(n);
                assert_eq!(v.coeff(0), partible::Rational::from_integer(want), "z = {z}, n = {n}");
            }
        }
    }
    let spec = SequenceSpec { family: Family::LargeSchroder, z: ZValue::Symbolic, epsilon: Epsilon::Plus };
    let vals = seq_by_recurrence(&spec, 40).unwrap();
    assert!(vals.iter().enumerate().all(|(n, v)| *v == large_schroder(n)));
}

#[test]
fn large_is_twice_little_at_one() {
    let large = schroder_table(SchroderFamily::Large, 1, 200);
    let little = schroder_table(SchroderFamily::Little, 1, 200);
    for n in 1..=200 {
        assert_eq!(large[n], &little[n] * 2);
    }
}

#[test]
fn certificate_json_pipeline() {
    for eps in Epsilon::BOTH {
        let op = schroder_operator(eps);
        let cert = schroder_certificate(4, eps).unwrap();
        let text = CertificateJson::from_certificate(&cert, Some(&op)).to_json_string();
        let (back, stored) = CertificateJson::from_json_str(&text).unwrap().to_certificate().unwrap();
        let stored = stored.unwrap();
        assert!(verify_certificate(&back, &stored));
        assert_eq!(stored, op);
    }
}

#[test]
fn operator_spec_file_analysis() {
    let spec: OperatorSpec = serde_json::from_str(
        r#"{"order": 2, "coeffs": ["k", "-(2*k+3)*(1+2*z)", "k+3"], "epsilon": 1}"#,
    )
    .unwrap();
    let op = spec.to_op().unwrap();
    assert_eq!(op, schroder_operator(Epsilon::Plus));
    let info = op_find_gamma(&op).unwrap();
    assert_eq!(info.gamma, partible::poly::rat(-1, 2));
    assert_eq!(info.degree, 1);
}

#[test]
fn large_primes_stay_exact() {
    let p = 499;
    assert!(is_prime(p));
    let direct = weighted_sum(SchroderFamily::Large, 2, Epsilon::Minus, 3, p);
    assert_eq!(weighted_sum_mod(SchroderFamily::Large, 2, Epsilon::Minus, 3, p, true).unwrap().residue(), 1);
    assert!(direct > BigInt::from(u64::MAX));
}
