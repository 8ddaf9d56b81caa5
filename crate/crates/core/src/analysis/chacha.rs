//! Plain IETF ChaCha20 block function (96-bit nonce, 32-bit counter).
//!
//! Written separately from the cipher core so it can serve as an
//! independent oracle and as the throughput baseline.

const SIGMA: [u32; 4] = [0x6170_7865, 0x3320_646e, 0x7962_2d32, 0x6b20_6574];

macro_rules! quarter_round {
    ($a:expr, $b:expr, $c:expr, $d:expr) => {
        $a = $a.wrapping_add($b);
        $d = ($d ^ $a).rotate_left(16);
        $c = $c.wrapping_add($d);
        $b = ($b ^ $c).rotate_left(12);
        $a = $a.wrapping_add($b);
        $d = ($d ^ $a).rotate_left(8);
        $c = $c.wrapping_add($d);
        $b = ($b ^ $c).rotate_left(7);
    };
}

pub fn chacha20_block(key: &[u8; 32], nonce: &[u8; 12], counter: u32) -> [u8; 64] {
    let le = |b: &[u8]| u32::from_le_bytes([b[0], b[1], b[2], b[3]]);
    let mut input = [0u32; 16];
    input[..4].copy_from_slice(&SIGMA);
    for i in 0..8 {
        input[4 + i] = le(&key[4 * i..]);
    }
    input[12] = counter;
    for i in 0..3 {
        input[13 + i] = le(&nonce[4 * i..]);
    }

    let mut x = input;
    for _ in 0..10 {
        quarter_round!(x[0], x[4], x[8], x[12]);
        quarter_round!(x[1], x[5], x[9], x[13]);
        quarter_round!(x[2], x[6], x[10], x[14]);
        quarter_round!(x[3], x[7], x[11], x[15]);
        quarter_round!(x[0], x[5], x[10], x[15]);
        quarter_round!(x[1], x[6], x[11], x[12]);
        quarter_round!(x[2], x[7], x[8], x[13]);
        quarter_round!(x[3], x[4], x[9], x[14]);
    }

    let mut out = [0u8; 64];
    for i in 0..16 {
        out[4 * i..4 * i + 4].copy_from_slice(&x[i].wrapping_add(input[i]).to_le_bytes());
    }
    out
}

/// XORs the ChaCha20 keystream starting at block `counter` into `data`.
pub fn chacha20_xor(key: &[u8; 32], nonce: &[u8; 12], mut counter: u32, data: &mut [u8]) {
    for chunk in data.chunks_mut(64) {
        let ks = chacha20_block(key, nonce, counter);
        for (d, k) in chunk.iter_mut().zip(ks.iter()) {
            *d ^= k;
        }
        counter = counter.wrapping_add(1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rfc8439_block_vector() {
        // RFC 8439 section 2.3.2
        let key: [u8; 32] = core::array::from_fn(|i| i as u8);
        let nonce = [0, 0, 0, 0x09, 0, 0, 0, 0x4a, 0, 0, 0, 0];
        let expected = hex::decode(
            "10f1e7e4d13b5915500fdd1fa32071c4c7d1f4c733c068030422aa9ac3d46c4e\
             d2826446079faa0914c2d705d98b02a2b5129cd1de164eb9cbd083e8a2503c4e",
        )
        .unwrap();
        assert_eq!(chacha20_block(&key, &nonce, 1).to_vec(), expected);
    }

    #[test]
    fn rfc8439_zero_vector() {
        // RFC 8439 appendix A.1, test vector 1
        let expected = hex::decode(
            "76b8e0ada0f13d90405d6ae55386bd28bdd219b8a08ded1aa836efcc8b770dc7\
             da41597c5157488d7724e03fb8d84a376a43b8f41518a11cc387b669b2ee6586",
        )
        .unwrap();
        assert_eq!(chacha20_block(&[0; 32], &[0; 12], 0).to_vec(), expected);
        assert_eq!(
            chacha20_block(&[0; 32], &[0; 12], 0),
            chacha20_block(&[0; 32], &[0; 12], 0)
        );
    }

    #[test]
    fn counter_avalanche() {
        let key = [7u8; 32];
        let nonce = [3u8; 12];
        let mut flipped = 0u32;
        let mut per_byte_changed = [0u32; 64];
        let trials = 2000u32;
        for c in 0..trials {
            let a = chacha20_block(&key, &nonce, c);
            let b = chacha20_block(&key, &nonce, c + 1);
            for (i, (x, y)) in a.iter().zip(b.iter()).enumerate() {
                flipped += (x ^ y).count_ones();
                if x != y {
                    per_byte_changed[i] += 1;
                }
            }
        }
        let rate = f64::from(flipped) / f64::from(trials * 512);
        assert!((rate - 0.5).abs() < 0.01, "{rate}");
        // a byte is unchanged with probability 1/256
        assert!(per_byte_changed.iter().all(|&n| n > trials * 97 / 100));
    }
}
