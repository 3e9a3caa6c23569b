use std::ffi::CStr;
use std::ptr;

use cosfit_ffi::*;

fn reference() -> CosfitParams {
    CosfitParams {
        a1: 10.0,
        a2: 5.0,
        a3: std::f64::consts::FRAC_PI_2,
        a4: 1.0,
    }
}

fn last_error() -> String {
    let p = cosfit_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn synth_estimate_fit_round() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            cosfit_signal_synth(&reference(), 10.0, 20.0, 0.0, 0.3, 1, &mut s),
            CosfitStatus::Ok
        );
        assert_eq!(cosfit_signal_len(s), 800);

        let mut init = CosfitParams {
            a1: 0.0,
            a2: 0.0,
            a3: 0.0,
            a4: 0.0,
        };
        assert_eq!(cosfit_estimate(s, &mut init), CosfitStatus::Ok);
        assert!((init.a3 / std::f64::consts::TAU - 0.25).abs() < 0.005);

        let mut fit = std::mem::zeroed::<CosfitFitResult>();
        assert_eq!(cosfit_fit(s, &init, 0, &mut fit), CosfitStatus::Ok);
        assert_eq!(fit.converged, 1);
        let truth = reference();
        for (got, want) in [
            (fit.params.a1, truth.a1),
            (fit.params.a2, truth.a2),
            (fit.params.a3, truth.a3),
            (fit.params.a4, truth.a4),
        ] {
            assert!((got - want).abs() < 1e-6);
        }

        let mut f = 0.0;
        assert_eq!(cosfit_lombscargle_peak(s, &mut f), CosfitStatus::Ok);
        assert!((f - 0.25).abs() <= 0.005);
        assert_eq!(cosfit_estimate_lombscargle(s, &mut init), CosfitStatus::Ok);
        cosfit_signal_free(s);
    }
}

#[test]
fn signal_new_sorts_and_copies() {
    unsafe {
        let x = [2.0, 0.0, 1.0];
        let y = [20.0, 0.0, 10.0];
        let mut s = ptr::null_mut();
        assert_eq!(
            cosfit_signal_new(x.as_ptr(), y.as_ptr(), 3, &mut s),
            CosfitStatus::Ok
        );
        let (mut xo, mut yo) = ([0.0; 3], [0.0; 3]);
        assert_eq!(
            cosfit_signal_copy(s, xo.as_mut_ptr(), yo.as_mut_ptr(), 3),
            CosfitStatus::Ok
        );
        assert_eq!(xo, [0.0, 1.0, 2.0]);
        assert_eq!(yo, [0.0, 10.0, 20.0]);
        assert_eq!(
            cosfit_signal_copy(s, xo.as_mut_ptr(), yo.as_mut_ptr(), 2),
            CosfitStatus::BufferTooSmall
        );
        cosfit_signal_free(s);
    }
}

#[test]
fn errors_map_to_codes_and_messages() {
    unsafe {
        let mut s = ptr::null_mut();
        let x = [1.0];
        assert_eq!(
            cosfit_signal_new(x.as_ptr(), x.as_ptr(), 1, &mut s),
            CosfitStatus::InvalidInput
        );
        assert!(s.is_null());
        assert!(last_error().contains("invalid input"));

        let nan = [0.0, f64::NAN];
        assert_eq!(
            cosfit_signal_new(nan.as_ptr(), nan.as_ptr(), 2, &mut s),
            CosfitStatus::InvalidInput
        );

        assert_eq!(
            cosfit_signal_new(ptr::null(), ptr::null(), 2, &mut s),
            CosfitStatus::NullPointer
        );
        assert_eq!(
            cosfit_estimate(ptr::null(), ptr::null_mut()),
            CosfitStatus::NullPointer
        );
        assert!(last_error().contains("null pointer"));

        let flat = [1.0, 1.0];
        assert_eq!(
            cosfit_signal_new(flat.as_ptr(), flat.as_ptr(), 2, &mut s),
            CosfitStatus::Ok
        );
        let mut p = std::mem::zeroed::<CosfitParams>();
        assert_eq!(cosfit_estimate(s, &mut p), CosfitStatus::DegenerateSpan);
        cosfit_signal_free(s);

        assert_eq!(
            cosfit_signal_synth(&reference(), 10.0, 20.0, 0.0, 0.7, 0, &mut s),
            CosfitStatus::InvalidConfig
        );
        cosfit_signal_free(ptr::null_mut());
        assert_eq!(cosfit_signal_len(ptr::null()), 0);
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(cosfit_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
