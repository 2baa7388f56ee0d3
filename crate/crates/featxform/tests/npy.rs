//! NPY interop against files written by numpy, plus round-trip properties.

use std::path::PathBuf;

use featxform::npy::{decode_npy, encode_npy, load_npy, save_npy};
use featxform_core::synth::{generate, SourceKind, SyntheticSourceSpec};
use featxform_core::FeatureTensor;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn reads_numpy_files() {
    let t = load_npy(fixture("numpy_f4_2x3.npy")).unwrap();
    assert_eq!(t.shape(), &[2, 3]);
    assert_eq!(t.values(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(t.source_tag(), "numpy_f4_2x3");

    let t = load_npy(fixture("numpy_f4_4d.npy")).unwrap();
    assert_eq!(t.shape(), &[2, 3, 4, 5]);
    let bits: Vec<u32> = [0, 1, 59, 119].iter().map(|&i| t.values()[i].to_bits()).collect();
    assert_eq!(bits, [0x4002_9e6b, 0xc023_9004, 0x3efb_949f, 0xbfa6_aa42]);
}

#[test]
fn rejects_unsupported_numpy_files() {
    for name in [
        "numpy_f8.npy",
        "numpy_f4_big_endian.npy",
        "numpy_f4_fortran.npy",
        "numpy_f4_rank5.npy",
        "numpy_f4_scalar.npy",
        "numpy_i4.npy",
        "numpy_f4_v2.npy",
    ] {
        let err = load_npy(fixture(name)).unwrap_err();
        assert_eq!(err.kind(), "format-error", "{name}: {err}");
    }
}

#[test]
fn io_errors() {
    assert_eq!(load_npy(fixture("missing.npy")).unwrap_err().kind(), "io-error");
    let dir = tempfile::tempdir().unwrap();
    let t = FeatureTensor::new(vec![1], vec![0.0], "z").unwrap();
    let err = save_npy(&t, dir.path().join("no/such/dir/z.npy")).unwrap_err();
    assert_eq!(err.kind(), "io-error");
}

#[test]
fn ten_thousand_values_round_trip() {
    let spec = SyntheticSourceSpec::new(SourceKind::default_heavy_tail(), 7);
    let t = generate(&spec, 10_000).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heavy.npy");
    save_npy(&t, &path).unwrap();
    let back = load_npy(&path).unwrap();
    assert_eq!(back.shape(), t.shape());
    assert!(back.values().iter().zip(t.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
}

fn tensors() -> impl Strategy<Value = FeatureTensor> {
    prop::collection::vec(1usize..6, 1..=4).prop_flat_map(|shape| {
        let n = shape.iter().product::<usize>();
        let finite = any::<f32>().prop_filter("finite", |v| v.is_finite());
        prop::collection::vec(finite, n).prop_map(move |v| FeatureTensor::new(shape.clone(), v, "p").unwrap())
    })
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(t in tensors()) {
        let back = decode_npy(&encode_npy(&t), "p").unwrap();
        prop_assert_eq!(back.shape(), t.shape());
        prop_assert!(back.values().iter().zip(t.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn truncation_never_panics(t in tensors(), cut in 0usize..200) {
        let bytes = encode_npy(&t);
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(decode_npy(&bytes[..cut], "p").is_err());
    }
}
