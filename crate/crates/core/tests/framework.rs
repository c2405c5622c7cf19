//! End-to-end behaviour of the tracking loop on synthetic sequences.

use omnitrack_core::framework::{track_sequence, FrameResult, InitTarget, NccTracker, OracleTracker, SearchPolicy};
use omnitrack_core::geom::geodesic_angle;
use omnitrack_core::synth::{cap_mask, render_frame, CapSpec, Trajectory, TrajectoryKind};
use omnitrack_core::{ErpImage, ErpSize, Mask, Result};

struct Scene {
    size: ErpSize,
    frames: Vec<ErpImage>,
    masks: Vec<Mask>,
    traj: Trajectory,
}

fn scene(kind: TrajectoryKind, n: usize, roll: isize) -> Scene {
    let size = ErpSize::new(960, 480).unwrap();
    let traj = Trajectory::new(kind, n).unwrap();
    let cap = CapSpec::new(traj.center(0), 12f64.to_radians()).unwrap();
    let frames = traj
        .centers()
        .iter()
        .map(|&c| render_frame(&cap.at(c), size, 5).roll_columns(roll))
        .collect();
    let masks = traj
        .centers()
        .iter()
        .map(|&c| cap_mask(&cap.at(c), size).roll_columns(roll))
        .collect();
    Scene {
        size,
        frames,
        masks,
        traj,
    }
}

fn policy() -> SearchPolicy {
    SearchPolicy {
        local_size: 256,
        ..SearchPolicy::default()
    }
}

fn run_oracle(s: &Scene) -> Vec<FrameResult> {
    let mut oracle = OracleTracker::from_masks(s.masks.clone());
    let frames = s.frames.iter().cloned().map(Ok::<_, omnitrack_core::Error>);
    track_sequence(frames, &InitTarget::Mask(s.masks[0].clone()), &mut oracle, &policy()).unwrap()
}

#[test]
fn oracle_stays_on_every_trajectory() {
    for kind in TrajectoryKind::ALL {
        let s = scene(kind, 16, 0);
        let r = run_oracle(&s);
        for (k, res) in r.iter().enumerate() {
            let err = geodesic_angle(res.bfov.center(), s.traj.center(k)).to_degrees();
            assert!(err < 1.0, "{kind} frame {k}: centre error {err}");
            assert_eq!(res.confidence, 1.0);
        }
    }
}

#[test]
fn deterministic() {
    let s = scene(TrajectoryKind::GreatCircle, 8, 0);
    assert_eq!(run_oracle(&s), run_oracle(&s));
}

#[test]
fn yaw_equivariant() {
    let k = 160;
    let a = run_oracle(&scene(TrajectoryKind::BorderCross, 10, 0));
    let b = run_oracle(&scene(TrajectoryKind::BorderCross, 10, k));
    let dlon = k as f64 * std::f64::consts::TAU / 960.0;
    for (x, y) in a.iter().zip(&b) {
        let shifted = omnitrack_core::LonLat::new(x.bfov.clon + dlon, x.bfov.clat).unwrap();
        assert!(geodesic_angle(shifted, y.bfov.center()).to_degrees() < 0.05);
        assert!((x.bfov.theta - y.bfov.theta).to_degrees().abs() < 0.05);
        assert!((x.bfov.phi - y.bfov.phi).to_degrees().abs() < 0.05);
        let du = (y.bbox.cx - x.bbox.cx - k as f64).rem_euclid(960.0);
        assert!(du.min(960.0 - du) < 1.0, "bbox centre moved by {du}");
    }
}

#[test]
fn ncc_tracks_moving_cap_from_bfov_init() {
    let s = scene(TrajectoryKind::BorderCross, 12, 0);
    let init = omnitrack_core::regions::mask_to_bfov(&s.masks[0], s.size, false).unwrap();
    let frames = s.frames.iter().cloned().map(Ok::<_, omnitrack_core::Error>);
    let r: Vec<FrameResult> =
        track_sequence(frames, &InitTarget::Bfov(init), &mut NccTracker::new(), &policy()).unwrap();
    for (k, res) in r.iter().enumerate() {
        let err = geodesic_angle(res.bfov.center(), s.traj.center(k)).to_degrees();
        assert!(err < 2.0, "frame {k}: centre error {err}");
    }
}

#[test]
fn empty_stream_is_an_error() {
    let frames: Vec<Result<ErpImage>> = Vec::new();
    let init = InitTarget::Mask(Mask::new(960, 480));
    assert!(track_sequence(frames, &init, &mut NccTracker::new(), &policy()).is_err());
}
