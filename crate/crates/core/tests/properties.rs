use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use padiclab::analysis::{
    euler_phi_prime_power, exp_series_coeffs, multiplicative_order, padic_log, teichmuller,
};
use padiclab::sequence::{catalan_exact, fibonacci_mod, legendre_valuation, Budgets, SequenceSpec};
use padiclab::shear::{extract_coefficients, limit_detect};
use padiclab::{valuation_and_norm, PadicApprox, PadicScalar};

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7, 11])
}

fn rat() -> impl Strategy<Value = (i64, i64)> {
    (-1_000_000i64..1_000_000, 1i64..1_000_000)
}

fn q((n, d): (i64, i64)) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn norm(x: &BigRational, p: u32) -> BigRational {
    valuation_and_norm(x, p).unwrap().1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ultrametric_and_isosceles(p in prime(), x in rat(), y in rat(), z in rat()) {
        let (x, y, z) = (q(x), q(y), q(z));
        let mut d = [norm(&(&x - &y), p), norm(&(&y - &z), p), norm(&(&x - &z), p)];
        prop_assert!(d[2] <= d[0].clone().max(d[1].clone()));
        d.sort();
        prop_assert_eq!(&d[1], &d[2]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn from_rational_round_trip(p in prime(), (n, d) in rat(), precision in 1usize..40) {
        let x = PadicScalar::from_rational(n, d, p, precision).unwrap();
        if n == 0 {
            prop_assert!(x.is_zero());
            return Ok(());
        }
        // unit * p^v * d == n at the unit's precision.
        let v = x.valuation().finite().unwrap();
        let unit = BigInt::from(x.unit().unwrap().residue());
        let pb = BigInt::from(p);
        let (lhs, rhs) = if v >= 0 {
            (unit * d * pb.pow(v as u32), BigInt::from(n))
        } else {
            (unit * d, BigInt::from(n) * pb.pow((-v) as u32))
        };
        let m = pb.pow(precision as u32 + v.unsigned_abs() as u32);
        prop_assert!(((lhs - rhs) % m).is_zero());
    }

    #[test]
    fn norm_is_multiplicative(p in prime(), x in rat(), y in rat()) {
        let (x, y) = (q(x), q(y));
        prop_assert_eq!(norm(&(&x * &y), p), norm(&x, p) * norm(&y, p));
    }

    #[test]
    fn ring_operations_match_integers(p in prime(), a in -100_000i64..100_000, b in -100_000i64..100_000, prec in 1usize..20) {
        let m = BigInt::from(p).pow(prec as u32);
        let x = PadicApprox::from_integer(a, p, prec).unwrap();
        let y = PadicApprox::from_integer(b, p, prec).unwrap();
        let want = |v: BigInt| PadicApprox::from_integer(((v % &m) + &m) % &m, p, prec).unwrap();
        prop_assert_eq!(x.add(&y).unwrap(), want(BigInt::from(a) + b));
        prop_assert_eq!(x.sub(&y).unwrap(), want(BigInt::from(a) - b));
        prop_assert_eq!(x.mul(&y).unwrap(), want(BigInt::from(a) * b));
    }

    #[test]
    fn log_is_a_homomorphism(a in 0i64..500, b in 0i64..500) {
        // Units congruent to 1 mod 4 in Z_2.
        let (u, w) = (4 * a + 1, 4 * b + 1);
        let prec = 24;
        let lu = padic_log(u, 2, prec).unwrap();
        let lw = padic_log(w, 2, prec).unwrap();
        let luw = padic_log(u * w, 2, prec).unwrap();
        let at = 24;
        let sum = lu.to_approx(at).unwrap().add(&lw.to_approx(at).unwrap()).unwrap();
        prop_assert_eq!(sum, luw.to_approx(at).unwrap());
    }

    #[test]
    fn euler_theorem(p in prime(), a in 1usize..8, k in 1i64..10_000) {
        prop_assume!(k % p as i64 != 0);
        let m = BigUint::from(p).pow(a as u32);
        let phi = euler_phi_prime_power(p, a).unwrap();
        prop_assert!(BigUint::from(k as u64).modpow(&phi, &m).is_one());
        let ord = multiplicative_order(k, p, a).unwrap();
        prop_assert!((&phi % &ord).is_zero());
        prop_assert!(BigUint::from(k as u64).modpow(&ord, &m).is_one());
    }

    #[test]
    fn teichmuller_is_a_root_of_unity(p in prime(), k in 1i64..1000, prec in 1usize..20) {
        prop_assume!(k % p as i64 != 0);
        let w = teichmuller(k, p, prec).unwrap();
        prop_assert_eq!(w.digit(0), Some((k % p as i64) as u32));
        prop_assert_eq!(w.pow(&BigUint::from(p - 1)), PadicApprox::one(p, prec).unwrap());
        prop_assert_eq!(w.pow(&BigUint::from(p)), w);
    }

    #[test]
    fn tower_limit_is_teichmuller(p in prop::sample::select(vec![3u32, 5, 7]), k in 1i64..100, prec in 1usize..6) {
        prop_assume!(k % p as i64 != 0);
        let spec = SequenceSpec::parse(&format!("power:{k},{p}@{p}^n"), Some(prec)).unwrap();
        let report = limit_detect(&spec, prec + 4, &Budgets::default()).unwrap();
        prop_assert!(report.converged());
        prop_assert_eq!(report.limit.unwrap(), teichmuller(k, p, prec).unwrap());
        // Exponents (p-1)p^n send everything to 1.
        let spec = SequenceSpec::parse(&format!("power:{k},{p}@{}*{p}^n", p - 1), Some(prec)).unwrap();
        let report = limit_detect(&spec, prec + 4, &Budgets::default()).unwrap();
        prop_assert_eq!(report.limit.unwrap(), PadicApprox::one(p, prec).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fibonacci_doubling_matches_iteration(m in 0u64..10_000, modulus in 2u64..1_000_000) {
        let (mut a, mut b) = (0u64, 1u64);
        for _ in 0..m {
            (a, b) = (b, (a + b) % modulus);
        }
        prop_assert_eq!(fibonacci_mod(m, &BigUint::from(modulus)).unwrap(), BigUint::from(a % modulus));
    }
}

#[test]
fn from_integer_matches_brute_force_digits() {
    for m in 0u32..(1 << 16) {
        let x = PadicApprox::from_integer(m, 2, 16).unwrap();
        let want: Vec<u32> = (0..16).map(|i| (m >> i) & 1).collect();
        assert_eq!(x.digits(), want.as_slice());
    }
}

#[test]
fn composite_base_norm_is_not_multiplicative() {
    let two = norm(&BigRational::from_integer(2.into()), 4);
    let four = norm(&BigRational::from_integer(4.into()), 4);
    assert!((&two * &two).is_one());
    assert_ne!(&two * &two, four);
}

#[test]
fn exp_coefficients_times_factorial_are_log_powers() {
    let prec = 20;
    let cs = exp_series_coeffs(3, 2, 5, prec).unwrap();
    let log = padic_log(3, 2, prec + 8).unwrap().to_approx(prec + 8).unwrap();
    let mut power = PadicApprox::one(2, prec + 8).unwrap();
    let mut factorial = 1i64;
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            power = power.mul(&log).unwrap();
            factorial *= i as i64;
        }
        let lhs = c.to_approx(prec).unwrap().mul(&PadicApprox::from_integer(factorial, 2, prec).unwrap()).unwrap();
        assert_eq!(lhs, power.truncate(prec).unwrap(), "i = {i}");
    }
}

#[test]
fn extraction_matches_exp_series() {
    for k in [3i64, 5, 7] {
        let extracted = extract_coefficients(k, 2, 3, 12, 120).unwrap();
        let series = exp_series_coeffs(k, 2, 3, 40).unwrap();
        for (i, (c, s)) in extracted.iter().zip(&series).enumerate() {
            let at = c.precision().min(12);
            let want = s.to_approx(at).unwrap();
            assert!(c.eq_at(&want, at), "k = {k}, i = {i}");
        }
    }
}

#[test]
fn catalan_is_odd_exactly_at_mersenne_indices() {
    let budgets = Budgets::default();
    for m in 0..300u64 {
        let odd = catalan_exact(m, &budgets).unwrap().bit(0);
        assert_eq!(odd, (m + 1).is_power_of_two(), "m = {m}");
    }
}

#[test]
fn legendre_closed_form() {
    for n in 0..=30u32 {
        assert_eq!(legendre_valuation(1 << n, 2).unwrap(), (1u64 << n) - 1);
    }
    for p in [3u32, 5, 7] {
        for m in 0..2000u64 {
            let mut v = 0;
            for i in 1..=m {
                let mut i = i;
                while i % p as u64 == 0 {
                    i /= p as u64;
                    v += 1;
                }
            }
            assert_eq!(legendre_valuation(m, p).unwrap(), v);
        }
    }
}

#[test]
fn residual_grows_with_row() {
    let cs = extract_coefficients(3, 2, 4, 32, 300).unwrap();
    for n in 4..=12usize {
        let known = cs.iter().enumerate().map(|(j, c)| c.precision() + j * n).min().unwrap();
        let m = BigInt::one() << known;
        let power = BigInt::from(3).modpow(&(BigInt::one() << n), &m);
        let series: BigInt = cs.iter().enumerate().map(|(j, c)| BigInt::from(c.residue()) << (j * n)).sum();
        let r = ((power - series) % &m + &m) % &m;
        let v = r.trailing_zeros().map_or(known, |v| v as usize);
        assert!(v >= 4 * n - 8);
    }
}
