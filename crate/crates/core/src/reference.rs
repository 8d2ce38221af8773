//! Closed-form reference values: the low-order correlators, integrated
//! corrections, leading-pole data and right-tail coefficients that the
//! verification suites re-derive.

use crate::algebra::rational::{rat, Rational};
use crate::algebra::{FactoredRatFn, XPoly};
use num_bigint::BigInt;

pub const OMEGA_1_1: &str = "(X-1)/2*(1/(z1-1)+1/(z1+1)) + (2-X)/z1 - 2/(z1-1/a)";

pub const OMEGA_2_0: &str = "X/(z1*z2-1)^2";

pub const OMEGA_1_2: &str = "2*a*(1-X)/((a^2-1)^2*(z1-1/a)^2) \
    + (5*X^2-9*X+5)/(16*(z1-1)^4) \
    + (X^2+(9*a+7)/(a-1)*(1-X))/(16*(z1-1)^3) \
    + (-X^2+X+(7*a^2+18*a+7)/(a-1)^2)/(32*(z1-1)^2) \
    + (-5*X^2+9*X-5)/(16*(z1+1)^4) \
    + (X^2+(9*a-7)/(a+1)*(1-X))/(16*(z1+1)^3) \
    + (X^2-X+(-7*a^2+18*a-7)/(a+1)^2)/(32*(z1+1)^2)";

pub const OMEGA_2_1: &str = "X*(X-1)*(1/(2*(z1-1)^3*(z2-1)^2) - 1/(2*(z1+1)^3*(z2+1)^2) \
    + 2*z2^2/((z1*z2-1)^3*(z2^2-1)^2) + z2^2*(1+3*z2^2)/((z1*z2-1)^2*(z2^2-1)^3)) \
    + X*(1+a)/(2*(1-a)*(z1-1)^2*(z2-1)^2) \
    + X*(1-a)/(2*(1+a)*(z1+1)^2*(z2+1)^2)";

pub const OMEGA_3_0: &str = "2*X^2*(1+z1*z2+z2*z3+z3*z1)*(z1+z2+z3+z1*z2*z3) \
    /((z1^2-1)^2*(z2^2-1)^2*(z3^2-1)^2)";

/// The five low-order correlators as `(n, k, expression)`.
pub const CORRELATORS: [(usize, usize, &str); 5] = [
    (1, 1, OMEGA_1_1),
    (2, 0, OMEGA_2_0),
    (1, 2, OMEGA_1_2),
    (2, 1, OMEGA_2_1),
    (3, 0, OMEGA_3_0),
];

pub fn correlator(n: usize, k: usize) -> Option<FactoredRatFn> {
    CORRELATORS
        .iter()
        .find(|c| c.0 == n && c.1 == k)
        .map(|c| FactoredRatFn::parse(n, c.2).expect("reference expression parses"))
}

/// `-∫_α^∞ ω_1^{[k]}` for `k = 2, 3, 4`, written in `Y = α² - 1`.
pub const INTEGRALS: [(usize, &str); 3] = [
    (
        2,
        "(-5*X^2+27*X-39)/(6*(a^2-1)^3) + (-3*X^2+19*X-33)/(4*(a^2-1)^2) + (X-4)/(2*(a^2-1))",
    ),
    (
        3,
        "(-10*X^3+73*X^2-191*X+180)/(2*(a^2-1)^6) \
         + (-25*X^3+187*X^2-507*X+501)/(2*(a^2-1)^5) \
         + (-80*X^3+627*X^2-1807*X+1926)/(8*(a^2-1)^4) \
         + (-15*X^3+133*X^2-438*X+539)/(6*(a^2-1)^3) \
         + (3*X^2-20*X+38)/(4*(a^2-1)^2)",
    ),
    (
        4,
        "(-1105*X^4+9720*X^3-34557*X^2+59238*X-41433)/(18*(a^2-1)^9) \
         + (-985*X^4+8724*X^3-31389*X^2+54786*X-39273)/(4*(a^2-1)^8) \
         + (-767*X^4+6871*X^3-25157*X^2+45003*X-33321)/(2*(a^2-1)^7) \
         + (-3443*X^4+31476*X^3-118455*X^2+219640*X-170091)/(12*(a^2-1)^6) \
         + (-1014*X^4+9660*X^3-38180*X^2+75015*X-62150)/(10*(a^2-1)^5) \
         + (-105*X^4+1120*X^3-4953*X^2+10902*X-10153)/(8*(a^2-1)^4) \
         + (15*X^3-128*X^2+412*X-506)/(6*(a^2-1)^3)",
    ),
];

pub fn integral(k: usize) -> Option<FactoredRatFn> {
    INTEGRALS
        .iter()
        .find(|c| c.0 == k)
        .map(|c| FactoredRatFn::parse(0, c.1).expect("reference expression parses"))
}

/// `(m, p_m, R̆_m)` with integer coefficients from `X^0` upwards.
pub fn breve() -> Vec<(usize, u32, XPoly)> {
    vec![
        (1, 3, XPoly::from_ints(&[-39, 27, -5])),
        (2, 5, XPoly::from_ints(&[540, -573, 219, -30])),
        (3, 9, XPoly::from_ints(&[-41433, 59238, -34557, 9720, -1105])),
    ]
}

/// `R_1, R_2, R_3`.
pub fn r_polys() -> Vec<XPoly> {
    vec![
        XPoly::from_ints(&[-39, 9, -5]).scale(&rat(1, 24)),
        XPoly::from_ints(&[36, -19, 11]).scale(&rat(5, 64)),
        XPoly::from_ints(&[-41433, 34938, -23325, 3240, -1105]).scale(&rat(1, 4608)),
    ]
}

fn frac(num: &str, two: u32, three: u32) -> Rational {
    let n: BigInt = num.parse().unwrap();
    let d = BigInt::from(2).pow(two) * BigInt::from(3).pow(three);
    Rational::new(n, d)
}

/// Coefficients of `s^{-3m/2}`, `m = 1..6`, in the bracket of `1 - TW_β`.
pub fn tail_coefficients(beta: u32) -> Option<Vec<Rational>> {
    let v = match beta {
        1 => vec![
            -frac("41", 4, 1),
            frac("9241", 9, 2),
            -frac("5075225", 13, 4),
            frac("5153008945", 19, 5),
            -frac("1674966309205", 23, 6),
            frac("3985569631633205", 28, 8),
        ],
        2 => vec![
            -frac("35", 3, 1),
            frac("3745", 7, 2),
            -frac("805805", 10, 4),
            frac("289554265", 15, 5),
            -frac("31241084875", 18, 6),
            frac("23604769513325", 22, 8),
        ],
        4 => vec![
            -frac("143", 4, 1),
            frac("41509", 9, 2),
            -frac("20443229", 13, 4),
            frac("15418569025", 19, 5),
            -frac("3330409204735", 23, 6),
            frac("4908974519795465", 28, 8),
        ],
        _ => return None,
    };
    Some(v)
}

/// Bracket coefficients of `∫_s^∞ R` (same as `β = 2`).
pub fn int_r_coefficients() -> Vec<Rational> {
    tail_coefficients(2).unwrap()
}

/// Bracket coefficients of `∫_s^∞ q` (same as `β = 1`).
pub fn int_q_coefficients() -> Vec<Rational> {
    tail_coefficients(1).unwrap()
}
