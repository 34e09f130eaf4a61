//! The rate-1/2 outer convolutional code correcting scattered bit errors.

use tcm_noma::harness::outer;

fn main() {
    let payload: Vec<u8> = (0..40).map(|i| (i * 7 % 3 == 0) as u8).collect();
    let mut coded = outer::encode(&payload);
    println!("{} payload bits -> {} coded bits", payload.len(), coded.len());
    for i in [3, 25, 47, 70] {
        coded[i] ^= 1;
    }
    let decoded = outer::decode(&coded, payload.len());
    println!("4 flipped bits corrected: {}", decoded == payload);
}
