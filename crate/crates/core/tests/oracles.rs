//! Independent oracles for companion matrices, search cost, and state files.

use gl_elgamal::analysis::{bgsdp_bruteforce, GsdpInstance};
use gl_elgamal::codec::{decode_state, encode_state};
use gl_elgamal::protocol::{consistent, establish, run_session};
use gl_elgamal::{Field, Fp, Fp251, Matrix, MatrixFp, Poly, RandomSource};

/// `det(xI - C)` at `d + 1` points, interpolated back to coefficients.
fn characteristic_poly<F: Field>(c: &Matrix<F>) -> Poly<F> {
    let d = c.dim();
    let xs: Vec<F> = (0..=d as u64).map(F::from_u64).collect();
    let ys: Vec<F> = xs
        .iter()
        .map(|&x| {
            Matrix::from_fn(d, |i, j| if i == j { x - c[(i, j)] } else { -c[(i, j)] }).determinant()
        })
        .collect();
    let mut acc = Poly::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(&ys).enumerate() {
        let mut basis = Poly::one();
        let mut denom = F::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis = &basis * &Poly::from_coeffs(vec![-xj, F::one()]);
                denom *= xi - xj;
            }
        }
        acc = &acc + &basis.scale(yi * denom.inv().unwrap());
    }
    acc
}

#[test]
fn companion_characteristic_polynomial_by_interpolation() {
    let mut rng = RandomSource::from_seed(b"charpoly");
    for d in [2, 3, 8] {
        for _ in 0..5 {
            let f = Poly::<Fp251>::random_monic(&mut rng, d);
            let c = Matrix::companion(&f).unwrap();
            assert_eq!(characteristic_poly(&c), f);
        }
    }
    let f = Poly::<Fp<3>>::from_u64s(&[1, 0, 1]);
    let c = Matrix::companion(&f).unwrap();
    assert_eq!(characteristic_poly(&c), f);
    let entries: Vec<u64> = c.entries().iter().map(|x| x.to_u64()).collect();
    assert_eq!(entries, [0, 2, 1, 0]);
}

#[test]
fn search_cost_grows_with_field_size() {
    // A singular y has no preimage under z^m x z^n, so the search visits
    // the whole space; its size grows with p.
    fn exhaust<const P: u8>(seed: &[u8]) -> (u64, u64) {
        let mut rng = RandomSource::from_seed(seed);
        let (mut inst, _) = GsdpInstance::<Fp<P>>::generate(&mut rng, 2, 4);
        inst.y = Matrix::zero(2);
        inst.exponents = None;
        let report = bgsdp_bruteforce(&inst, 4).unwrap();
        assert!(report.witness.is_none());
        (report.checks, report.space)
    }
    let costs = [
        exhaust::<3>(b"c3"),
        exhaust::<5>(b"c5"),
        exhaust::<7>(b"c7"),
    ];
    for (checks, space) in costs {
        assert_eq!(checks, space);
    }
    // (p-1)(p-2) diagonals times 16 exponent pairs
    assert_eq!(costs.map(|c| c.0), [2 * 16, 12 * 16, 30 * 16]);
}

#[test]
fn search_refuses_large_instances() {
    let mut rng = RandomSource::from_seed(b"guard");
    let (inst, _) = GsdpInstance::<Fp251>::generate(&mut rng, 2, 4);
    assert!(bgsdp_bruteforce(&inst, 4).is_err());
    let (inst, _) = GsdpInstance::<Fp<5>>::generate(&mut rng, 3, 4);
    assert!(bgsdp_bruteforce(&inst, 4).is_err());
    let (inst, _) = GsdpInstance::<Fp<5>>::generate(&mut rng, 2, 4);
    assert!(bgsdp_bruteforce(&inst, 0).is_err());
    assert!(bgsdp_bruteforce(&inst, 65).is_err());
}

#[test]
fn state_files_resume_the_protocol() {
    let mut rng = RandomSource::from_seed(b"state");
    let (mut a, mut b) = establish::<Fp251>(&mut rng, 8).unwrap();
    run_session(&mut a, &mut b).unwrap();
    let a2 = decode_state::<Fp251>(&encode_state(&a).unwrap()).unwrap();
    let mut b2 = decode_state::<Fp251>(&encode_state(&b).unwrap()).unwrap();
    assert!(consistent(&a2, &b2));
    let h = MatrixFp::random(&mut rng, 8);
    let block = a2.encrypt_for_peer(&h, &mut rng).unwrap();
    assert_eq!(b2.decrypt_block(&block).unwrap(), h);

    let mut a3 = a2.clone();
    run_session(&mut a3, &mut b2).unwrap();
    run_session(&mut a, &mut b).unwrap();
    assert!(consistent(&a3, &a));
    assert!(consistent(&a3, &b2));
}

#[test]
fn truncated_state_files_are_rejected() {
    let mut rng = RandomSource::from_seed(b"state-trunc");
    let (a, _) = establish::<Fp251>(&mut rng, 8).unwrap();
    let bytes = encode_state(&a).unwrap();
    for len in 0..bytes.len() {
        assert!(
            decode_state::<Fp251>(&bytes[..len]).is_err(),
            "prefix {len} accepted"
        );
    }
    let mut extended = bytes.clone();
    extended.push(0);
    assert!(decode_state::<Fp251>(&extended).is_err());
}
