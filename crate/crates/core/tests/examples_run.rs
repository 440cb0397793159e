// Every example doubles as a smoke test.

macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run().expect(concat!($file, " failed"));
        }
    };
}

example!(channel_basics, channel_basics_runs, "channel_basics.rs");
example!(codes, codes_run, "codes.rs");
example!(schedules, schedules_run, "schedules.rs");
example!(decode_bch, decode_bch_runs, "decode_bch.rs");
example!(reshuffle_train, reshuffle_train_runs, "reshuffle_train.rs");
example!(rmatrix_export, rmatrix_export_runs, "rmatrix_export.rs");
example!(bler_sweep, bler_sweep_runs, "bler_sweep.rs");
example!(oracle_checks, oracle_checks_run, "oracle_checks.rs");
