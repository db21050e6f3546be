//! Recirculation probabilities that a switch can realize with random bits.

use core::fmt;
use core::str::FromStr;

use num_rational::Ratio;

use crate::error::{invalid, Error};
use crate::random::RandomSource;

/// How the ideal admission probability `1/(carry_min+1)` is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ProbMode {
    /// Ideal probability; needs an arbitrary-range random integer.
    #[default]
    Exact,
    /// `2^-x` with `x = ceil(log2(carry_min))`; writes `2^x`. A 2-approximation.
    PowerOfTwo,
    /// `2^-y / floor(T)` where `carry_min + 1 = 2^y * T`, `T in [8, 16)`.
    /// A 9/8-approximation; writes `carry_min + 1`.
    NineEighths,
}

impl ProbMode {
    pub const ALL: [ProbMode; 3] = [ProbMode::Exact, ProbMode::PowerOfTwo, ProbMode::NineEighths];

    pub fn as_str(self) -> &'static str {
        match self {
            ProbMode::Exact => "exact",
            ProbMode::PowerOfTwo => "pow2",
            ProbMode::NineEighths => "nine-eighths",
        }
    }
}

impl fmt::Display for ProbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "ideal" => Ok(ProbMode::Exact),
            "pow2" | "power-of-two" | "2-approx" | "2approx" => Ok(ProbMode::PowerOfTwo),
            "nine-eighths" | "9/8" | "9/8-approx" | "nine_eighths" => Ok(ProbMode::NineEighths),
            _ => Err(invalid(
                "prob_mode",
                "expected one of exact, pow2, nine-eighths",
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Draw {
    Certain,
    /// Uniform integer in `[0, range)` compared to zero.
    Uniform {
        range: u64,
    },
    /// `bits` random bits compared to zero.
    ZeroBits {
        bits: u32,
    },
    /// `zero_bits` random bits compared to zero, and `lookup_bits` random
    /// bits compared below `threshold`.
    Split {
        zero_bits: u32,
        lookup_bits: u32,
        threshold: u64,
    },
}

/// The recirculation coin for one unmatched packet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecircDecision {
    /// Counter value written by the recirculated packet.
    pub new_value: u64,
    draw: Draw,
}

fn pow2(e: u32) -> u128 {
    1u128 << e
}

impl RecircDecision {
    /// Nominal probability, before lookup-table quantization.
    pub fn probability(&self) -> Ratio<u128> {
        match self.draw {
            Draw::Certain => Ratio::from_integer(1),
            Draw::Uniform { range } => Ratio::new(1, range as u128),
            Draw::ZeroBits { bits } => Ratio::new(1, pow2(bits)),
            Draw::Split { .. } => {
                // nominal 2^-y / floor(T) == 1 / ((c+1) truncated to 4 significant bits)
                Ratio::new(1, self.new_value_nominal_divisor())
            }
        }
    }

    /// Probability actually realized by the random-bit comparisons.
    pub fn realized_probability(&self) -> Ratio<u128> {
        match self.draw {
            Draw::Split {
                zero_bits,
                lookup_bits,
                threshold,
            } => Ratio::new(threshold as u128, pow2(zero_bits) << lookup_bits),
            _ => self.probability(),
        }
    }

    /// Random bits drawn per decision. Exact mode reports one 64-bit word.
    pub fn bits_consumed(&self) -> u32 {
        match self.draw {
            Draw::Certain => 0,
            Draw::Uniform { .. } => 64,
            Draw::ZeroBits { bits } => bits,
            Draw::Split {
                zero_bits,
                lookup_bits,
                ..
            } => zero_bits + lookup_bits,
        }
    }

    /// Flip the coin.
    #[inline]
    pub fn sample(&self, rng: &mut RandomSource) -> bool {
        match self.draw {
            Draw::Certain => true,
            Draw::Uniform { range } => rng.below(range) == 0,
            Draw::ZeroBits { bits } => rng.bits(bits) == 0,
            Draw::Split {
                zero_bits,
                lookup_bits,
                threshold,
            } => (zero_bits == 0 || rng.bits(zero_bits) == 0) && rng.bits(lookup_bits) < threshold,
        }
    }

    fn new_value_nominal_divisor(&self) -> u128 {
        let v = self.new_value as u128;
        let lg = 127 - v.leading_zeros();
        if lg <= 3 {
            v
        } else {
            let y = lg - 3;
            (v >> y) << y
        }
    }
}

/// Decide how an unmatched packet that saw `carry_min` recirculates.
///
/// `lookup_bits` is the width of the random draw compared against the
/// `floor(2^N / floor(T))` table in [`ProbMode::NineEighths`]; it must lie in
/// `4..=64` and is ignored by the other modes.
pub fn recirc_decision(carry_min: u64, mode: ProbMode, lookup_bits: u32) -> RecircDecision {
    assert!(
        (4..=64).contains(&lookup_bits),
        "lookup_bits must be in 4..=64"
    );
    if carry_min == 0 {
        return RecircDecision {
            new_value: 1,
            draw: Draw::Certain,
        };
    }
    match mode {
        ProbMode::Exact => {
            let v = carry_min.saturating_add(1);
            RecircDecision {
                new_value: v,
                draw: Draw::Uniform { range: v },
            }
        }
        ProbMode::PowerOfTwo => {
            if carry_min == 1 {
                return RecircDecision {
                    new_value: 1,
                    draw: Draw::Certain,
                };
            }
            // ceil(log2(carry_min)) for carry_min >= 2
            let x = 64 - (carry_min - 1).leading_zeros();
            RecircDecision {
                new_value: 1u64.checked_shl(x).unwrap_or(u64::MAX),
                draw: Draw::ZeroBits { bits: x },
            }
        }
        ProbMode::NineEighths => {
            let v = carry_min.saturating_add(1);
            let lg = 63 - v.leading_zeros() as i32;
            let y = lg - 3;
            let space = pow2(lookup_bits);
            let (zero_bits, threshold) = if y >= 0 {
                let floor_t = (v >> y) as u128;
                (y as u32, space / floor_t)
            } else {
                // T = v * 2^-y is integral; fold 2^-y into the table entry
                (0, space / v as u128)
            };
            RecircDecision {
                new_value: v,
                draw: Draw::Split {
                    zero_bits,
                    lookup_bits,
                    threshold: threshold as u64,
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u128, d: u128) -> Ratio<u128> {
        Ratio::new(n, d)
    }

    #[test]
    fn zero_carry_min_is_certain_in_every_mode() {
        for mode in ProbMode::ALL {
            let d = recirc_decision(0, mode, 16);
            assert_eq!(d.probability(), r(1, 1));
            assert_eq!(d.new_value, 1);
            assert_eq!(d.bits_consumed(), 0);
        }
    }

    #[test]
    fn power_of_two_examples() {
        let d = recirc_decision(5, ProbMode::PowerOfTwo, 16);
        assert_eq!(d.probability(), r(1, 8));
        assert_eq!(d.new_value, 8);
        assert_eq!(d.bits_consumed(), 3);
        // rounding follows ceil(log2(carry_min))
        let d = recirc_decision(4, ProbMode::PowerOfTwo, 16);
        assert_eq!(d.probability(), r(1, 4));
        assert_eq!(d.new_value, 4);
        let d = recirc_decision(1, ProbMode::PowerOfTwo, 16);
        assert_eq!(d.probability(), r(1, 1));
        assert_eq!(d.new_value, 1);
        let d = recirc_decision(100, ProbMode::PowerOfTwo, 16);
        assert_eq!(d.probability(), r(1, 128));
    }

    #[test]
    fn nine_eighths_examples() {
        // 5 = 2^-1 * 10
        let d = recirc_decision(4, ProbMode::NineEighths, 16);
        assert_eq!(d.probability(), r(1, 5));
        assert_eq!(d.new_value, 5);
        assert_eq!(d.realized_probability(), r(65536 / 5, 65536));
        // 101 = 2^3 * 12.625
        let d = recirc_decision(100, ProbMode::NineEighths, 16);
        assert_eq!(d.probability(), r(1, 96));
        assert_eq!(d.new_value, 101);
        assert_eq!(d.bits_consumed(), 3 + 16);
        assert_eq!(d.realized_probability(), r(65536 / 12, 8 * 65536));
        let ratio = d.probability() * Ratio::from_integer(101u128);
        assert_eq!(ratio, r(101, 96));
        assert!(ratio < r(9, 8));
    }

    #[test]
    fn exact_examples() {
        let d = recirc_decision(3, ProbMode::Exact, 16);
        assert_eq!(d.probability(), r(1, 4));
        assert_eq!(d.new_value, 4);
    }

    #[test]
    fn sampled_frequency_matches_probability() {
        let mut rng = RandomSource::new(8);
        let trials = 200_000u32;
        for (c, mode) in [
            (3, ProbMode::Exact),
            (5, ProbMode::PowerOfTwo),
            (20, ProbMode::NineEighths),
            (4, ProbMode::NineEighths),
        ] {
            let d = recirc_decision(c, mode, 16);
            let hits = (0..trials).filter(|_| d.sample(&mut rng)).count();
            let p = d.realized_probability();
            let p = *p.numer() as f64 / *p.denom() as f64;
            let sd = (p * (1.0 - p) / trials as f64).sqrt();
            let f = hits as f64 / trials as f64;
            assert!((f - p).abs() < 5.0 * sd, "c={c} {mode}: {f} vs {p}");
        }
    }

    #[test]
    fn parses_mode_names() {
        for m in ProbMode::ALL {
            assert_eq!(m.as_str().parse::<ProbMode>().unwrap(), m);
        }
        assert_eq!("9/8".parse::<ProbMode>().unwrap(), ProbMode::NineEighths);
        assert!("coin".parse::<ProbMode>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn power_of_two_is_two_approx(c in 0u64..(1 << 40)) {
            let d = recirc_decision(c, ProbMode::PowerOfTwo, 16);
            let ratio = d.probability() * Ratio::from_integer(c as u128 + 1);
            proptest::prop_assert!(ratio > r(1, 2) && ratio <= r(2, 1));
            proptest::prop_assert!(d.new_value.is_power_of_two());
        }

        #[test]
        fn nine_eighths_quantized_bounds(c in 0u64..(1 << 40), n in 8u32..=32) {
            let d = recirc_decision(c, ProbMode::NineEighths, n);
            let v = Ratio::from_integer(c as u128 + 1);
            let nominal = d.probability() * v;
            proptest::prop_assert!(nominal >= r(1, 1) && nominal < r(9, 8));
            let realized = d.realized_probability() * v;
            let lower = Ratio::from_integer(1u128) - r(1, 1u128 << (n - 4));
            proptest::prop_assert!(realized >= lower && realized < r(9, 8));
        }
    }
}
