//! Number formatting shared by the text reports.

use std::f64::consts::PI;

use choreo_core::model::{exact_to_f64, Exact};
use choreo_core::resonance::best_rational;
use num_integer::Integer;
use num_bigint::BigInt;
use num_traits::{One, Signed};

/// Up to ten significant digits, trailing zeros removed, Unicode minus.
pub fn real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.abs() < 1e-4 || x.abs() >= 1e10 {
        return format!("{x:.3e}").replace('-', "−");
    }
    let digits = (9 - x.abs().log10().floor() as i32).clamp(0, 15) as usize;
    let mut s = format!("{x:.digits$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s.replace('-', "−")
}

/// Terminating decimals of up to eight places as decimals, anything else as `p/q`.
pub fn exact(x: &Exact) -> String {
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut d = x.denom().clone();
    let mut places = 0;
    while places <= 8 && !d.is_one() {
        if d.is_multiple_of(&two) {
            d /= &two;
        } else if d.is_multiple_of(&five) {
            d /= &five;
        } else {
            places = usize::MAX;
            break;
        }
        places += 1;
    }
    if places <= 8 {
        real(exact_to_f64(x))
    } else {
        let sign = if x.is_negative() { "−" } else { "" };
        format!("{sign}{}/{}", x.numer().abs(), x.denom())
    }
}

pub fn tuple<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    format!("({})", items.iter().map(f).collect::<Vec<_>>().join(", "))
}

pub fn set(items: impl IntoIterator<Item = usize>) -> String {
    format!("{{{}}}", items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", "))
}

/// `2π/√k`-style form of a period when `(2π/T)²` is a small rational.
pub fn period(t: f64) -> String {
    let w2 = (2.0 * PI / t).powi(2);
    let (p, q) = best_rational(w2, 64);
    if p == 0 || ((p as f64 / q as f64) - w2).abs() > 1e-9 * w2 {
        return real(t);
    }
    let root = |v: u64| {
        let r = (v as f64).sqrt().round() as u64;
        (r * r == v).then_some(r)
    };
    match (root(p), root(q)) {
        (Some(1), Some(1)) => "2π".into(),
        (Some(a), Some(1)) => format!("2π/{a}"),
        (Some(a), Some(b)) if a == 1 => format!("{b}·2π"),
        (Some(a), Some(b)) => format!("{b}·2π/{a}"),
        (None, Some(1)) => format!("2π/√{p}"),
        (None, Some(b)) => format!("{b}·2π/√{p}"),
        _ => format!("2π/√({p}/{q})"),
    }
}

/// `k/m` of the period as `T`, `T/m` or `kT/m`.
pub fn fraction_of_period(k: usize, m: usize) -> String {
    if k == 0 {
        return "0".into();
    }
    let g = k.gcd(&m);
    match (k / g, m / g) {
        (1, 1) => "T".into(),
        (1, d) => format!("T/{d}"),
        (a, 1) => format!("{a}T"),
        (a, d) => format!("{a}T/{d}"),
    }
}
