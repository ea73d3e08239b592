//! Variation operators on packed bit strings.

use rand::Rng;

use crate::bitstring::BitString;

/// Uniform crossover: each position of the first child comes from `a` or `b`
/// with equal probability, the second child takes the other parent's bit.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &BitString,
    b: &BitString,
    rng: &mut R,
) -> (BitString, BitString) {
    assert_eq!(a.len(), b.len(), "crossover of unequal lengths");
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    let (wa, wb) = (a.words(), b.words());
    for w in 0..wa.len() {
        let mask = rng.random::<u64>();
        c1.words_mut()[w] = (wa[w] & mask) | (wb[w] & !mask);
        c2.words_mut()[w] = (wb[w] & mask) | (wa[w] & !mask);
    }
    (c1, c2)
}

/// Independent bit-flip mutation at `rate` per position.
///
/// Flip positions are found by geometric skipping, which has the same
/// distribution as one Bernoulli trial per bit.
pub fn mutate<R: Rng + ?Sized>(x: &mut BitString, rate: f64, rng: &mut R) -> usize {
    let len = x.len();
    if rate <= 0.0 || len == 0 {
        return 0;
    }
    if rate >= 1.0 {
        for i in 0..len {
            x.flip(i);
        }
        return len;
    }
    let log_keep = (-rate).ln_1p();
    let mut flips = 0;
    let mut i = 0usize;
    loop {
        let v = 1.0 - rng.random::<f64>(); // (0, 1]
        let skip = (v.ln() / log_keep).floor();
        if skip >= (len - i) as f64 {
            break;
        }
        i += skip as usize;
        x.flip(i);
        flips += 1;
        i += 1;
        if i >= len {
            break;
        }
    }
    flips
}
