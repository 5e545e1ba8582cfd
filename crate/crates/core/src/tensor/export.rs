//! Columnar text format for tensors.
//!
//! ```text
//! tensor
//! in 2
//! out 2 2
//! 1.0 0.0
//! 0.0 -0.5
//! ...
//! ```
//!
//! One `re im` row per entry in row-major order over inputs then outputs.
//! Floats are written in shortest round-trip form, so the output is
//! bit-stable and re-reads to identical values.

use super::{Tensor, TensorError, TensorResult};
use crate::C64;

pub fn to_columnar(t: &Tensor) -> String {
    let mut s = String::from("tensor\nin");
    for d in t.in_shape() {
        s.push_str(&format!(" {d}"));
    }
    s.push_str("\nout");
    for d in t.out_shape() {
        s.push_str(&format!(" {d}"));
    }
    s.push('\n');
    for z in t.data() {
        s.push_str(&format!("{:?} {:?}\n", z.re, z.im));
    }
    s
}

pub fn parse_columnar(text: &str) -> TensorResult<Tensor> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let err = |line: usize, msg: &str| TensorError::Format { line: line + 1, msg: msg.to_string() };

    let (n, header) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    if header.trim() != "tensor" {
        return Err(err(n, "expected `tensor` header"));
    }
    let mut dims = |key: &str| -> TensorResult<Vec<usize>> {
        let (n, line) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(err(n, &format!("expected `{key}` line")));
        }
        parts.map(|p| p.parse::<usize>().map_err(|_| err(n, "bad dimension"))).collect()
    };
    let in_shape = dims("in")?;
    let out_shape = dims("out")?;
    let mut data = Vec::new();
    for (n, line) in lines {
        let mut parts = line.split_whitespace();
        let re = parts.next().and_then(|p| p.parse::<f64>().ok()).ok_or_else(|| err(n, "bad real part"))?;
        let im = parts.next().and_then(|p| p.parse::<f64>().ok()).ok_or_else(|| err(n, "bad imaginary part"))?;
        if parts.next().is_some() {
            return Err(err(n, "trailing data"));
        }
        data.push(C64::new(re, im));
    }
    Tensor::new(&in_shape, &out_shape, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columnar_round_trip_is_bit_exact() {
        let vals = [0.1, -0.0, 1.0 / 3.0, 1e-300, f64::MAX, 2.0_f64.sqrt()];
        let data: Vec<C64> = vals.iter().zip(vals.iter().rev()).map(|(&a, &b)| C64::new(a, b)).collect();
        let t = Tensor::new(&[2], &[3], data).unwrap();
        let text = to_columnar(&t);
        let back = parse_columnar(&text).unwrap();
        assert_eq!(to_columnar(&back), text);
        for (a, b) in t.data().iter().zip(back.data()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn scalar_has_empty_shapes() {
        let t = Tensor::scalar(C64::new(3.0, 0.0));
        assert_eq!(to_columnar(&t), "tensor\nin\nout\n3.0 0.0\n");
    }

    #[test]
    fn rejects_wrong_entry_count() {
        assert!(parse_columnar("tensor\nin 2\nout\n1 0\n").is_err());
        assert!(parse_columnar("tensr\nin\nout\n1 0\n").is_err());
    }
}
