use plh_core::code::cer_bound;
use plh_core::codebook::default_codebooks;
use plh_core::decoders::{DecoderConfig, DecoderKind, SimpleMode};
use plh_core::harness::{
    find_snr_at_cer, measure_gap, read_results_csv, run_cer, write_results_csv, GapSearch, Simulator, SweepSpec,
};
use plh_core::modem::AmplitudeModel;

fn s1(alpha: f64) -> DecoderConfig {
    DecoderConfig::new(DecoderKind::Strategy1 { alpha })
}

fn s2(beta: f64) -> DecoderConfig {
    DecoderConfig::new(DecoderKind::Strategy2 { beta })
}

#[test]
fn high_snr_is_error_free() {
    let (table, cb, _) = default_codebooks();
    let e = run_cer(&cb, &table, 6, &s1(0.7), 30.0, 10_000, 1).unwrap();
    assert_eq!((e.trials, e.errors), (10_000, 0));
}

#[test]
fn same_seed_same_counts() {
    let (table, cb, _) = default_codebooks();
    let a = run_cer(&cb, &table, 1, &s1(0.5), -7.0, 20_000, 99).unwrap();
    let b = run_cer(&cb, &table, 1, &s1(0.5), -7.0, 20_000, 99).unwrap();
    assert_eq!(a, b);
    let c = run_cer(&cb, &table, 1, &s1(0.5), -7.0, 20_000, 100).unwrap();
    assert_ne!(a.errors, c.errors);
}

#[test]
fn counts_do_not_depend_on_thread_count() {
    let (table, cb, _) = default_codebooks();
    let sim = Simulator::new(&cb, &table).with_amplitude(AmplitudeModel::Uniform);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sim.run_cer(3, &s2(0.2), -4.0, 30_000, 5).unwrap())
    };
    let one = run(1);
    assert!(one.errors > 0);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn invalid_inputs_are_rejected() {
    let (table, cb, fixed) = default_codebooks();
    assert!(run_cer(&cb, &table, 40, &s1(0.5), 0.0, 10, 1).is_err());
    assert!(run_cer(&cb, &table, 6, &s1(0.5), 0.0, 0, 1).is_err());
    assert!(run_cer(&cb, &table, 6, &s1(-1.0), 0.0, 10, 1).is_err());
    assert!(run_cer(&cb, &table, 6, &s1(0.5), f64::NAN, 10, 1).is_err());
    // the standard decoder needs the fixed-length codebook
    let standard = DecoderConfig::new(DecoderKind::Standard);
    assert!(run_cer(&cb, &table, 6, &standard, 0.0, 10, 1).is_err());
    assert!(run_cer(&fixed, &table, 6, &standard, 0.0, 10, 1).is_ok());
}

#[test]
fn standard_decoder_respects_the_union_bound() {
    let (table, _, fixed) = default_codebooks();
    let standard = DecoderConfig::new(DecoderKind::Standard);
    // sized for d_min = 26; below about -5.5 dB the noncoherent CER overtakes it
    for esn0 in [-5.0, -4.0, -2.85] {
        let e = run_cer(&fixed, &table, 1, &standard, esn0, 200_000, 3).unwrap();
        let bound = cer_bound(6, 26, esn0, 1.0);
        assert!(
            e.cer - 3.0 * e.std_error() <= bound,
            "{esn0} dB: {e:?} vs bound {bound}"
        );
    }
}

#[test]
fn cer_decreases_with_snr() {
    let (table, cb, fixed) = default_codebooks();
    let sim = Simulator::new(&cb, &table);
    let fsim = Simulator::new(&fixed, &table);
    let standard = DecoderConfig::new(DecoderKind::Standard);
    let simple = DecoderConfig::new(DecoderKind::Simple {
        mode: SimpleMode::OwnLength,
    });
    for (sim, dec, id) in [
        (&sim, s1(0.5), 1),
        (&sim, s1(0.5), 6),
        (&sim, s2(0.2), 1),
        (&sim, s2(0.2), 6),
        (&sim, simple, 6),
        (&fsim, standard, 6),
    ] {
        let threshold = table.get(id).unwrap().threshold_db;
        let grid: Vec<f64> = (0..6).map(|i| threshold - 8.0 + i as f64).collect();
        let ests: Vec<_> = grid
            .iter()
            .map(|&x| sim.run_cer(id, &dec, x, 20_000, 8).unwrap())
            .collect();
        for (w, x) in ests.windows(2).zip(&grid) {
            assert!(
                w[1].cer <= w[0].cer || w[1].overlaps(&w[0]),
                "{dec:?} ModCod {id} at {x} dB: {:?} then {:?}",
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn strategy2_tail_term_dominates_at_high_snr() {
    // β/σ² grows without bound, so short candidates eventually outscore the
    // true 64-bit codeword
    let (table, cb, _) = default_codebooks();
    let near = run_cer(&cb, &table, 1, &s2(0.2), 0.0, 20_000, 2).unwrap();
    let far = run_cer(&cb, &table, 1, &s2(0.2), 6.0, 20_000, 2).unwrap();
    assert!(far.ci95_lo > near.ci95_hi, "{near:?} {far:?}");
    // strategy 1 has no such term
    assert_eq!(run_cer(&cb, &table, 1, &s1(0.5), 6.0, 20_000, 2).unwrap().errors, 0);
}

#[test]
fn sweep_covers_the_cross_product() {
    let (table, cb, _) = default_codebooks();
    let sim = Simulator::new(&cb, &table);
    let spec = SweepSpec {
        modcod_ids: vec![1, 6],
        decoder: s1(0.5),
        param_grid: vec![0.3, 1.0],
        esn0_grid: vec![-4.0, -2.0, 0.0],
        trials: 2000,
        seed: 4,
    };
    let rows = sim.sweep(&spec).unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[3].param_value, Some(1.0));
    assert_eq!(rows[3].esn0_db, -4.0);
    // parameterless decoders ignore the parameter grid
    let single = SweepSpec {
        modcod_ids: vec![6],
        decoder: DecoderConfig::new(DecoderKind::Simple {
            mode: SimpleMode::ZeroPadded,
        }),
        esn0_grid: vec![0.0],
        ..spec.clone()
    };
    let rows = sim.sweep(&single).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(
        (rows[0].param_name.as_deref(), rows[0].decoder.as_str()),
        (None, "simple")
    );
    let mut buf = Vec::new();
    write_results_csv(&rows, &mut buf).unwrap();
    assert_eq!(read_results_csv(&buf[..]).unwrap(), rows);
    assert!(sim
        .sweep(&SweepSpec {
            esn0_grid: vec![],
            ..spec
        })
        .is_err());
}

#[test]
fn looser_target_is_reached_at_lower_snr() {
    let (table, cb, _) = default_codebooks();
    let sim = Simulator::new(&cb, &table);
    let search = |target| GapSearch {
        initial_trials: 5_000,
        max_trials: 80_000,
        ..GapSearch::new(target, (-12.0, 6.0), 6)
    };
    let loose = find_snr_at_cer(&sim, 6, &s1(0.5), &search(1e-2)).unwrap();
    let tight = find_snr_at_cer(&sim, 6, &s1(0.5), &search(1e-3)).unwrap();
    assert!(loose <= tight, "{loose} > {tight}");
}

#[test]
fn gap_result_json_shape() {
    let (table, cb, _) = default_codebooks();
    let sim = Simulator::new(&cb, &table);
    let search = GapSearch {
        initial_trials: 2_000,
        max_trials: 8_000,
        ..GapSearch::new(1e-2, (-8.0, 8.0), 1)
    };
    let g = measure_gap(&sim, 6, &s2(0.2), &search).unwrap();
    assert!((g.gap_db - (g.snr_at_target_db - 5.13)).abs() < 1e-12);
    let v: serde_json::Value = serde_json::to_value(vec![&g]).unwrap();
    let obj = &v[0];
    for key in [
        "modcod_id",
        "decoder",
        "target_cer",
        "snr_at_target_db",
        "ldpc_threshold_db",
        "gap_db",
    ] {
        assert!(obj.get(key).is_some(), "{key}");
    }
    assert_eq!(obj["decoder"]["kind"]["kind"], "strategy2");
    assert_eq!(obj["decoder"]["kind"]["beta"], 0.2);
}
