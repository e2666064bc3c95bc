use std::f64::consts::PI;

use dt_torque::mechanics::{rotate_ensemble, rotate_ensembles, Atom};
use dt_torque::presets::FigurePreset;
use dt_torque::Execution;

fn ring(n: usize, r: f64) -> Vec<Atom> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            Atom::at_rest(r * a.cos(), r * a.sin())
        })
        .collect()
}

#[test]
fn positive_torque_function_spins_atoms_clockwise() {
    let p = FigurePreset::lookup("fig2a").unwrap();
    let traj = rotate_ensemble(
        &p.fields(),
        &p.probes(),
        &p.detuning(0.0),
        &ring(12, 0.7),
        0.05,
        400,
    )
    .unwrap();
    assert!(traj.tau > 0.0);
    assert_eq!(traj.clamped, 0);
    for k in 0..12 {
        let v: Vec<f64> = traj
            .frames
            .iter()
            .map(|f| f.atoms[k].azimuthal_velocity)
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "atom {k}");
        assert!(traj.frames.last().unwrap().atoms[k].angle < 0.0);
    }
}

#[test]
fn eit_point_leaves_resting_atoms_in_place() {
    let p = FigurePreset::lookup("fig2a").unwrap();
    let atoms = ring(8, 1.0);
    let traj =
        rotate_ensemble(&p.fields(), &p.probes(), &p.detuning(1.0), &atoms, 0.1, 200).unwrap();
    assert!(traj.tau.abs() < 1e-15);
    for (a, s) in atoms.iter().zip(&traj.frames.last().unwrap().atoms) {
        assert!((a.position[0] - s.position[0]).abs() < 1e-10);
        assert!((a.position[1] - s.position[1]).abs() < 1e-10);
    }
}

#[test]
fn kinetic_energy_conserved_without_force() {
    let p = FigurePreset::lookup("fig2a").unwrap();
    let probes = p.probes().with_charge(0);
    let atoms = vec![
        Atom {
            position: [1.0, 0.0],
            velocity: [0.1, 0.3],
            mass: 2.0,
        },
        Atom {
            position: [-0.5, 0.4],
            velocity: [-0.2, 0.05],
            mass: 0.5,
        },
    ];
    let traj = rotate_ensemble(&p.fields(), &probes, &p.detuning(0.0), &atoms, 0.01, 1000).unwrap();
    let ke = |f: &dt_torque::mechanics::EnsembleFrame| -> f64 {
        f.atoms
            .iter()
            .zip(&atoms)
            .map(|(s, a)| 0.5 * a.mass * (s.velocity[0].powi(2) + s.velocity[1].powi(2)))
            .sum()
    };
    let e0 = ke(&traj.frames[0]);
    for f in &traj.frames {
        assert!((ke(f) - e0).abs() <= 1e-14 * e0);
    }
    // Straight-line drift.
    let last = traj.frames.last().unwrap();
    assert!((last.atoms[0].position[0] - (1.0 + 0.1 * 10.0)).abs() < 1e-12);
}

#[test]
fn ensembles_agree_across_execution_modes() {
    let p = FigurePreset::lookup("fig3a").unwrap();
    let ensembles: Vec<Vec<Atom>> = (1..=6).map(|i| ring(5, 0.3 * i as f64)).collect();
    let run = |exec| {
        rotate_ensembles(
            &p.fields(),
            &p.probes(),
            &p.detuning(-0.5),
            &ensembles,
            0.05,
            100,
            exec,
        )
    };
    let a: Vec<_> = run(Execution::Parallel)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    let b: Vec<_> = run(Execution::Sequential)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    assert_eq!(a, b);
}
