use std::ffi::{CStr, CString};
use std::ptr;

use risfas_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(risfas_last_error_message()) }.to_string_lossy().into_owned()
}

struct Handle(*mut RisfasScenario);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { risfas_scenario_free(self.0) }
    }
}

fn from_toml(text: &str) -> Result<Handle, RisfasStatus> {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    match unsafe { risfas_scenario_from_toml(c.as_ptr(), &mut h) } {
        RisfasStatus::Ok => Ok(Handle(h)),
        s => Err(s),
    }
}

#[test]
fn default_scenario_sop() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { risfas_scenario_new_default(&mut h) }, RisfasStatus::Ok);
    let h = Handle(h);
    assert_eq!(unsafe { risfas_scenario_ports(h.0, RisfasNode::Legitimate) }, 4);
    let mut est = RisfasEstimate::default();
    assert_eq!(unsafe { risfas_sop(h.0, RisfasSopPath::Reference, &mut est) }, RisfasStatus::Ok);
    assert!(est.value > 1e-6 && est.value < 1e-4, "{est:?}");
    assert!(est.error < 0.1 * est.value);
    assert_eq!(last_error(), "");
}

#[test]
fn snr_cdf_and_pdf() {
    let h = from_toml("avg_snr_e_db = 0.0\nports_e = 1").unwrap();
    let mut est = RisfasEstimate::default();
    let g = 6.0 * 2f64.ln();
    assert_eq!(unsafe { risfas_snr_cdf(h.0, RisfasNode::Eavesdropper, g, &mut est) }, RisfasStatus::Ok);
    assert!((est.value - 0.5).abs() < 1e-12);
    let mut pdf = 0.0;
    assert_eq!(
        unsafe { risfas_snr_pdf(h.0, RisfasNode::Eavesdropper, g, RisfasPdfMode::Paper, &mut pdf) },
        RisfasStatus::Ok
    );
    assert!((pdf - 0.5 / 6.0).abs() < 1e-12);
}

#[test]
fn config_errors_are_reported() {
    assert_eq!(from_toml("[link]\npathloss_exp = 1.5").err(), Some(RisfasStatus::Config));
    assert!(last_error().contains("pathloss_exp"));
    assert_eq!(from_toml("unknown = 1").err(), Some(RisfasStatus::Config));
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { risfas_scenario_from_toml(ptr::null(), &mut h) }, RisfasStatus::NullPointer);
    assert!(h.is_null());
    unsafe { risfas_scenario_free(ptr::null_mut()) };
}

#[test]
fn numerics_entry_points() {
    let mut nodes = [0.0; 2];
    let mut weights = [0.0; 2];
    let s = unsafe { risfas_gauss_laguerre(2, nodes.as_mut_ptr(), weights.as_mut_ptr()) };
    assert_eq!(s, RisfasStatus::Ok);
    assert!((nodes[0] - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    assert!((weights[0] - 0.853_553_390_593_273_7).abs() < 1e-12);
    assert_eq!(
        unsafe { risfas_gauss_laguerre(0, nodes.as_mut_ptr(), weights.as_mut_ptr()) },
        RisfasStatus::InvalidArgument
    );
    let mut q = 0.0;
    assert_eq!(unsafe { risfas_marcum_q_half(0.0, 1.0, &mut q) }, RisfasStatus::Ok);
    assert!((q - 0.317_310_507_862_914).abs() < 1e-12);
    assert_eq!(unsafe { risfas_marcum_q_half(-1.0, 1.0, &mut q) }, RisfasStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { risfas_marcum_q_half(1.0, 1.0, ptr::null_mut()) }, RisfasStatus::NullPointer);
    let v = unsafe { CStr::from_ptr(risfas_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
