use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use omnitrack_core::metrics::{contour_accuracy, dual_success, sphere_iou_weighted, spherical_weights};
use omnitrack_core::regions::{ebfov_grid, mask_to_bfov, mask_to_rbbox};
use omnitrack_core::remap::{default_dilation_radius, extract_region, lift_mask, sample_mask};
use omnitrack_core::synth::{cap_mask, render_frame, CapSpec};
use omnitrack_core::{Bfov, ErpSize, LonLat};

fn frame_size() -> ErpSize {
    ErpSize::new(1920, 960).unwrap()
}

fn fixture() -> (CapSpec, Bfov) {
    let cap = CapSpec::new(LonLat::from_degrees(30.0, 40.0).unwrap(), 12f64.to_radians()).unwrap();
    let bfov = Bfov::from_degrees(30.0, 40.0, 50.0, 50.0, 10.0).unwrap();
    (cap, bfov)
}

fn remap(c: &mut Criterion) {
    let size = frame_size();
    let (cap, b) = fixture();
    let img = render_frame(&cap, size, 0);
    let wide = Bfov::from_degrees(30.0, 40.0, 120.0, 100.0, 0.0).unwrap();
    let mut g = c.benchmark_group("remap");
    g.bench_function("ebfov_grid_tangent_512", |x| {
        x.iter(|| ebfov_grid(black_box(&b), 512, 512, size).unwrap())
    });
    g.bench_function("ebfov_grid_spherical_512", |x| {
        x.iter(|| ebfov_grid(black_box(&wide), 512, 512, size).unwrap())
    });
    g.bench_function("extract_region_512", |x| {
        x.iter(|| extract_region(&img, black_box(&b), 512, 512).unwrap())
    });

    let mask = cap_mask(&cap, size);
    let grid = ebfov_grid(&b, 512, 512, size).unwrap();
    let local = sample_mask(&mask, &grid).unwrap();
    let r = default_dilation_radius(size, 512);
    g.bench_function("lift_mask_512", |x| {
        x.iter(|| lift_mask(black_box(&local), &grid, size, r).unwrap())
    });
    g.finish();
}

fn regions(c: &mut Criterion) {
    let size = frame_size();
    let (cap, _) = fixture();
    let mask = cap_mask(&cap, size);
    let mut g = c.benchmark_group("regions");
    g.bench_function("mask_to_bfov", |x| {
        x.iter(|| mask_to_bfov(black_box(&mask), size, false).unwrap())
    });
    g.bench_function("mask_to_rbfov", |x| {
        x.iter(|| mask_to_bfov(black_box(&mask), size, true).unwrap())
    });
    g.bench_function("mask_to_rbbox", |x| x.iter(|| mask_to_rbbox(black_box(&mask)).unwrap()));
    g.finish();
}

fn metrics(c: &mut Criterion) {
    let size = frame_size();
    let (cap, b) = fixture();
    let shifted = Bfov::from_degrees(34.0, 38.0, 48.0, 52.0, 0.0).unwrap();
    let mut g = c.benchmark_group("metrics");
    g.bench_function("spherical_weights_1920", |x| {
        x.iter(|| spherical_weights(black_box(size)))
    });
    let w = spherical_weights(size);
    g.bench_function("sphere_iou_1920", |x| {
        x.iter(|| sphere_iou_weighted(black_box(&b), black_box(&shifted), &w))
    });

    let gt = cap_mask(&cap, size);
    let tr = cap_mask(&cap.at(LonLat::from_degrees(31.0, 40.5).unwrap()), size);
    g.bench_function("contour_accuracy_1920", |x| {
        x.iter(|| contour_accuracy(black_box(&gt), black_box(&tr), Some(&w), 8).unwrap())
    });
    let rg = mask_to_rbbox(&gt).unwrap();
    let rt = mask_to_rbbox(&tr).unwrap();
    g.bench_function("dual_success", |x| {
        x.iter(|| dual_success(black_box(&rg), black_box(&rt), size))
    });
    g.finish();
}

criterion_group!(benches, remap, regions, metrics);
criterion_main!(benches);
