use num_complex::Complex;
use proptest::prelude::*;
use std::f64::consts::TAU;
use wick_gibbs::torus_field::*;
use wick_gibbs::{Error, Field};

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

#[test]
fn lattice_counts() {
    for (n, count) in [(0, 1), (1, 5), (2, 13), (3, 29), (4, 49), (8, 197), (16, 797)] {
        let l = Lattice::new(n);
        assert_eq!(l.len(), count, "N={n}");
        let brute = (-(n as i32)..=n as i32)
            .flat_map(|a| (-(n as i32)..=n as i32).map(move |b| [a, b]))
            .filter(|&p| norm_sq(p) <= (n as i64).pow(2))
            .count();
        assert_eq!(brute, count);
    }
}

#[test]
fn lattice_index_is_sorted_and_inverse() {
    let l = Lattice::new(7);
    let pts = l.points();
    assert!(pts.windows(2).all(|w| w[0] < w[1]));
    for (i, &p) in pts.iter().enumerate() {
        assert_eq!(l.index(p), Some(i));
    }
    assert_eq!(l.index([7, 1]), None);
    assert_eq!(l.index([5, 5]), None);
    assert_eq!(l.row_half_width(0), Some(7));
    assert_eq!(l.row_half_width(5), Some(4));
    assert_eq!(l.row_half_width(8), None);
}

#[test]
fn sigma_values() {
    // Exact sums: σ_1 = 3, σ_2 = 77/15, σ_3 = 329/45.
    assert_eq!(sigma_n::<f64>(0), 1.0);
    assert!((sigma_n::<f64>(1) - 3.0).abs() < 1e-15);
    assert!((sigma_n::<f64>(2) - 77.0 / 15.0).abs() < 1e-14);
    assert!((sigma_n::<f64>(3) - 329.0 / 45.0).abs() < 1e-14);
    assert!((sigma_n::<f64>(4) - 8.84510652745947).abs() < 1e-12);
    assert!((sigma_n::<f64>(8) - 13.07400985396587).abs() < 1e-12);
    assert!((sigma_n::<f64>(16) - 17.42915550602183).abs() < 1e-12);
}

#[test]
fn sigma_grows_like_two_pi_log() {
    for n in [64u32, 128, 256, 512, 1024] {
        let ratio = sigma_n::<f64>(n) / (n as f64).ln();
        assert!((6.0..6.6).contains(&ratio), "N={n}: {ratio}");
    }
    // Successive doublings add about 2π ln 2.
    let d = sigma_n::<f64>(1024) - sigma_n::<f64>(512);
    assert!((d - TAU * 2f64.ln()).abs() < 1e-2, "{d}");
}

#[test]
fn noise_is_nested_and_counter_based() {
    let big = NoiseVector::<f64>::generate(42, 12);
    let small = NoiseVector::<f64>::generate(42, 5);
    for (i, &p) in Lattice::new(5).points().iter().enumerate() {
        assert_eq!(small.gaussians()[i], big.get(p).unwrap());
        assert_eq!(gaussian_at(42, p), small.gaussians()[i]);
    }
    assert_ne!(NoiseVector::<f64>::generate(43, 5), small);
    let f = sample_gff::<f64>(9, 10);
    assert_eq!(f.restrict(4).unwrap(), sample_gff::<f64>(9, 4));
    assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    assert_eq!(derive_seed(7, 123), derive_seed(7, 123));
}

#[test]
fn f32_noise_is_the_f64_stream_rounded() {
    let a = NoiseVector::<f64>::generate(5, 4);
    let b = NoiseVector::<f32>::generate(5, 4);
    for (x, y) in a.gaussians().iter().zip(b.gaussians()) {
        assert_eq!(x.re as f32, y.re);
        assert_eq!(x.im as f32, y.im);
    }
}

#[test]
fn gaussian_moments() {
    let n = 40_000;
    let (mut re2, mut im2, mut reim, mut abs4) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let g = gaussian_at(derive_seed(11, i), [1, -2]);
        re2 += g.re * g.re;
        im2 += g.im * g.im;
        reim += g.re * g.im;
        abs4 += g.norm_sqr().powi(2);
    }
    let nf = n as f64;
    // E Re² = E Im² = 1/2, E Re Im = 0, E|g|⁴ = 2.
    assert!((re2 / nf - 0.5).abs() < 0.02);
    assert!((im2 / nf - 0.5).abs() < 0.02);
    assert!((reim / nf).abs() < 0.02);
    assert!((abs4 / nf - 2.0).abs() < 0.1);
}

#[test]
fn gff_mode_variance() {
    let n = 20_000u64;
    let mut acc = [0.0f64; 3];
    let modes = [[0, 0], [1, 1], [3, 0]];
    for i in 0..n {
        let f = sample_gff::<f64>(derive_seed(3, i), 3);
        for (k, &p) in modes.iter().enumerate() {
            acc[k] += f.get(p).norm_sqr();
        }
    }
    for (k, &p) in modes.iter().enumerate() {
        let expect = 1.0 / (1.0 + norm_sq(p) as f64);
        let got = acc[k] / n as f64;
        assert!((got - expect).abs() < 0.04 * expect, "{p:?}: {got} vs {expect}");
    }
}

#[test]
fn wgf1_round_trip() {
    let f = sample_gff::<f64>(17, 6);
    let mut buf = Vec::new();
    write_wgf1(&f, &mut buf).unwrap();
    assert_eq!(&buf[..4], b"WGF1");
    assert_eq!(buf.len(), 12 + 24 * Lattice::new(6).len());
    let g: Field = read_wgf1(buf.as_slice()).unwrap();
    assert_eq!(f, g);
}

#[test]
fn wgf1_sparse_records_and_errors() {
    let mut buf = Vec::new();
    buf.extend_from_slice(b"WGF1");
    buf.extend_from_slice(&2u32.to_le_bytes());
    buf.extend_from_slice(&1u32.to_le_bytes());
    for v in [1i32, -1] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&0.5f64.to_le_bytes());
    buf.extend_from_slice(&(-2.0f64).to_le_bytes());
    let f: Field = read_wgf1(buf.as_slice()).unwrap();
    assert_eq!(f.get([1, -1]), c(0.5, -2.0));
    assert_eq!(f.mass(), 4.25);

    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(matches!(read_wgf1::<f64, _>(bad.as_slice()), Err(Error::Format(_))));
    let truncated = &buf[..buf.len() - 3];
    assert!(matches!(read_wgf1::<f64, _>(truncated), Err(Error::Format(_))));

    // A point outside the ball.
    let mut outside = buf.clone();
    outside[12..16].copy_from_slice(&3i32.to_le_bytes());
    assert!(matches!(read_wgf1::<f64, _>(outside.as_slice()), Err(Error::Format(_))));

    // Records out of order.
    let mut two = Vec::new();
    two.extend_from_slice(b"WGF1");
    two.extend_from_slice(&2u32.to_le_bytes());
    two.extend_from_slice(&2u32.to_le_bytes());
    for p in [[1i32, 0], [0, 0]] {
        two.extend_from_slice(&p[0].to_le_bytes());
        two.extend_from_slice(&p[1].to_le_bytes());
        two.extend_from_slice(&1.0f64.to_le_bytes());
        two.extend_from_slice(&0.0f64.to_le_bytes());
    }
    assert!(matches!(read_wgf1::<f64, _>(two.as_slice()), Err(Error::Format(_))));
}

#[test]
fn json_round_trip() {
    let f = sample_gff::<f64>(5, 3);
    let v = field_to_json(&f);
    assert_eq!(v["cutoff"], 3);
    assert_eq!(v["modes"].as_array().unwrap().len(), 29);
    let text = serde_json::to_string(&v).unwrap();
    let back: Field = field_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(f, back);
    let bad = serde_json::json!({"cutoff": 1, "modes": [{"n": [2, 0], "re": 1.0, "im": 0.0}]});
    assert!(matches!(field_from_json::<f64>(&bad), Err(Error::Format(_))));
    assert!(matches!(field_from_json::<f64>(&serde_json::json!({"x": 1})), Err(Error::Format(_))));
}

#[test]
fn field_operations() {
    let f = sample_gff::<f64>(1, 5);
    let p = f.project(2).unwrap();
    assert_eq!(p.cutoff(), 5);
    assert_eq!(p.get([1, 1]), f.get([1, 1]));
    assert_eq!(p.get([2, 1]), c(0.0, 0.0));
    assert_eq!(project(&f, 2).unwrap(), p);
    let r = f.restrict(2).unwrap();
    assert_eq!(r.coeffs().len(), 13);
    assert_eq!(r.extend(5).unwrap(), p);
    assert!((f.inner(&f).re - f.mass()).abs() < 1e-14);
    assert!((f.inner(&r).re - r.mass()).abs() < 1e-14);
    assert!(matches!(f.restrict(6), Err(Error::Range(_))));
    assert!(matches!(f.project(6), Err(Error::Range(_))));
    assert!(matches!(f.extend(4), Err(Error::Range(_))));
    let mut g = f.clone();
    assert!(matches!(g.set([6, 0], c(1.0, 0.0)), Err(Error::Range(_))));
    assert!(matches!(Field::from_coeffs(2, vec![c(0.0, 0.0); 12]), Err(Error::Range(_))));
    assert_eq!(f.get([9, 9]), c(0.0, 0.0));
}

#[test]
fn physical_values_of_a_single_mode() {
    let mut f = Field::zeros(3);
    f.set([2, -1], c(0.5, 0.25)).unwrap();
    let g = 8;
    let vals = to_physical(&f, g).unwrap();
    for j1 in 0..g {
        for j2 in 0..g {
            let x = [TAU * j1 as f64 / g as f64, TAU * j2 as f64 / g as f64];
            let expect = c(0.5, 0.25) * Complex::from_polar(1.0, 2.0 * x[0] - x[1]);
            assert!((vals[j1 * g + j2] - expect).norm() < 1e-14);
        }
    }
    let back = to_spectral(&vals, 3).unwrap();
    for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
        assert!((a - b).norm() < 1e-15);
    }
}

#[test]
fn grid_errors_and_sizes() {
    let f = Field::zeros(4);
    assert!(matches!(to_physical(&f, 8), Err(Error::Aliasing { grid: 8, required: 9 })));
    assert!(matches!(to_physical(&f, MAX_GRID + 1), Err(Error::Resource(_))));
    assert!(matches!(to_spectral::<f64>(&[c(0.0, 0.0); 10], 1), Err(Error::Domain(_))));
    assert_eq!(default_grid_size(4), 16);
    assert_eq!(default_grid_size(7), 16);
    assert_eq!(fast_grid_size(97), 108);
    assert_eq!(fast_grid_size(49), 54);
    assert_eq!(fast_grid_size(25), 27);
    assert_eq!(fast_grid_size(64), 64);
}

#[test]
fn eta_has_unit_norm_and_tests_the_field() {
    for n in [1u32, 4, 9] {
        let x = [0.3, -1.7];
        let eta = eta_n::<f64>(x, n);
        assert!((eta.mass() - 1.0).abs() < 1e-13);
        // ⟨u, η⟩ = σ^{-1/2} Σ û(n) e_n(x)/√(1+|n|²), a smoothed point evaluation.
        let mut u = Field::zeros(n);
        u.set([1, 0], c(1.0, 0.0)).unwrap();
        let expect = Complex::from_polar(1.0, x[0]) / (2.0f64.sqrt() * sigma_n::<f64>(n).sqrt());
        assert!((u.inner(&eta) - expect).norm() < 1e-14);
    }
}

#[test]
fn gamma_kernel_values() {
    let k = gamma_kernel(2.0f64, 6);
    assert_eq!(k.cutoff(), 6);
    assert_eq!(k.exponent(), 2.0);
    let at0 = gamma_eval(&k, [0.0, 0.0]);
    assert!((at0.re - sigma_n::<f64>(6)).abs() < 1e-12 && at0.im.abs() < 1e-12);
    let x = [0.4, 1.1];
    let brute: Complex<f64> = Lattice::new(6)
        .points()
        .iter()
        .map(|&p| Complex::from_polar(1.0 / (1.0 + norm_sq(p) as f64), p[0] as f64 * x[0] + p[1] as f64 * x[1]))
        .sum();
    assert!((gamma_eval(&k, x) - brute).norm() < 1e-12);
    // Even kernel: real everywhere.
    assert!(gamma_eval(&k, x).im.abs() < 1e-12);
    assert_eq!(k.as_field().get([1, 2]), c(1.0 / 6.0, 0.0));
}

#[test]
fn white_noise_functional_pairs_coefficients() {
    let noise = NoiseVector::<f64>::generate(2, 3);
    let mut f = Field::zeros(2);
    f.set([0, 1], c(2.0, 0.0)).unwrap();
    let w = white_noise_functional(&f, &noise).unwrap();
    assert!((w - c(2.0, 0.0) * noise.get([0, 1]).unwrap().conj()).norm() < 1e-15);
    let too_big = Field::zeros(4);
    assert!(matches!(white_noise_functional(&too_big, &noise), Err(Error::Range(_))));
}

proptest! {
    #[test]
    fn synthesis_round_trips(seed in 0u64..1000, n in 0u32..6, extra in 0usize..5) {
        let f = sample_gff::<f64>(seed, n);
        let g = 2 * n as usize + 1 + extra;
        let back = to_spectral(&to_physical(&f, g).unwrap(), n).unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn parseval(seed in 0u64..1000, n in 1u32..6) {
        let f = sample_gff::<f64>(seed, n);
        let g = 2 * n as usize + 2;
        let vals = to_physical(&f, g).unwrap();
        let l2: f64 = vals.iter().map(|v| v.norm_sqr()).sum::<f64>() / (g * g) as f64;
        prop_assert!((l2 - f.mass()).abs() < 1e-12 * f.mass().max(1.0));
    }

    #[test]
    fn gff_restriction_is_nested(seed in any::<u64>(), n in 0u32..6, extra in 1u32..5) {
        prop_assert_eq!(sample_gff::<f64>(seed, n + extra).restrict(n).unwrap(), sample_gff::<f64>(seed, n));
    }
}
