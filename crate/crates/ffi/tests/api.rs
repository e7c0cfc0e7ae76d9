use std::ffi::{CStr, CString};
use std::ptr;

use surplus_lab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn excursion_round_trip() {
    unsafe {
        let mut e = ptr::null_mut();
        let steps = CString::new("UUDUDD").unwrap();
        assert_eq!(sl_excursion_from_steps(steps.as_ptr(), &mut e), SlStatus::Ok);
        let mut n = 0;
        assert_eq!(sl_excursion_n(e, &mut n), SlStatus::Ok);
        assert_eq!(n, 3);
        let mut buf = [0u32; 7];
        let mut written = 0;
        assert_eq!(sl_excursion_values(e, buf.as_mut_ptr(), 7, &mut written), SlStatus::Ok);
        assert_eq!(buf, [0, 1, 2, 1, 2, 1, 0]);
        assert_eq!(sl_excursion_values(e, buf.as_mut_ptr(), 3, &mut written), SlStatus::BufferTooSmall);
        assert_eq!(written, 7);
        // corners 1..5 at heights 1 2 1 2 1: B counts pairs with f(j) in {f(i), f(i)-1}, j >= i
        let mut b = 0;
        assert_eq!(sl_excursion_weight(e, SlMode::Bf, &mut b), SlStatus::Ok);
        assert_eq!(b, 3 + 4 + 2 + 2 + 1);
        sl_excursion_free(e);
    }
}

#[test]
fn rejects_bad_input() {
    unsafe {
        let mut e = ptr::null_mut();
        let steps = CString::new("UDDU").unwrap();
        assert_eq!(sl_excursion_from_steps(steps.as_ptr(), &mut e), SlStatus::InvalidArgument);
        assert!(e.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(sl_excursion_from_steps(ptr::null(), &mut e), SlStatus::NullPointer);
        let mut w = 0;
        assert_eq!(sl_wright(0, &mut w), SlStatus::Domain);
        assert_eq!(sl_wright(13, &mut w), SlStatus::Domain);
        sl_excursion_free(ptr::null_mut());
        sl_map_free(ptr::null_mut());
        sl_string_free(ptr::null_mut());
    }
}

#[test]
fn wright_and_pairings() {
    unsafe {
        let mut w = 0;
        for (s, expected) in [(1, 1), (2, 5), (3, 60)] {
            assert_eq!(sl_wright(s, &mut w), SlStatus::Ok);
            assert_eq!(w, expected);
        }
        let mut ok = false;
        let one = CString::new("(1,3)(2,4)").unwrap();
        assert_eq!(sl_sg_check(one.as_ptr(), &mut ok), SlStatus::Ok);
        assert!(ok);
        let planar = CString::new("(1,2)(3,4)").unwrap();
        assert_eq!(sl_sg_check(planar.as_ptr(), &mut ok), SlStatus::Ok);
        assert!(!ok);
        let bad = CString::new("(1,1)").unwrap();
        assert_eq!(sl_sg_check(bad.as_ptr(), &mut ok), SlStatus::InvalidArgument);
    }
}

#[test]
fn psi_count_small() {
    // genus one over planted trees with 3 edges; the other three contours
    // touch zero inside and are not planted
    let mut total = 0;
    unsafe {
        let sigma = CString::new("(1,3)(2,4)").unwrap();
        for w in ["UUDUDD", "UUUDDD"] {
            let mut e = ptr::null_mut();
            let c = CString::new(w).unwrap();
            assert_eq!(sl_excursion_from_steps(c.as_ptr(), &mut e), SlStatus::Ok);
            let mut k = 0;
            assert_eq!(sl_psi_count(e, sigma.as_ptr(), &mut k), SlStatus::Ok);
            total += k;
            sl_excursion_free(e);
        }
    }
    assert_eq!(total, 3);
}

#[test]
fn map_lifecycle() {
    unsafe {
        let mut e = ptr::null_mut();
        let steps = CString::new("UUDUDD").unwrap();
        assert_eq!(sl_excursion_from_steps(steps.as_ptr(), &mut e), SlStatus::Ok);
        let corners = CString::new(r#"{"mode":"bf","i":[2,4],"k":[1,1]}"#).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(sl_map_insert(e, corners.as_ptr(), &mut m), SlStatus::Ok, "{}", last_error());
        let (mut n, mut s, mut faces, mut genus, mut radius) = (0, 0, 0, 0, 0);
        assert_eq!(sl_map_size(m, &mut n, &mut s), SlStatus::Ok);
        assert_eq!((n, s), (3, 1));
        assert_eq!(sl_map_faces(m, &mut faces), SlStatus::Ok);
        assert_eq!(sl_map_genus(m, &mut genus), SlStatus::Ok);
        assert_eq!(faces, 2);
        assert_eq!(genus, 0);
        assert_eq!(sl_map_radius(m, &mut radius), SlStatus::Ok);
        assert_eq!(radius, 2);

        let mut json = ptr::null_mut();
        assert_eq!(sl_map_to_json(m, &mut json), SlStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(sl_map_from_json(json, &mut back), SlStatus::Ok);
        sl_string_free(json);

        let mut contour = ptr::null_mut();
        let mut xi = ptr::null_mut();
        assert_eq!(sl_map_explore(back, SlMode::Bf, &mut contour, &mut xi), SlStatus::Ok);
        let text = CStr::from_ptr(xi).to_str().unwrap().to_owned();
        assert!(text.contains(r#""i":[2,4]"#), "{text}");
        let mut buf = [0u32; 7];
        let mut written = 0;
        assert_eq!(sl_excursion_values(contour, buf.as_mut_ptr(), 7, &mut written), SlStatus::Ok);
        assert_eq!(buf, [0, 1, 2, 1, 2, 1, 0]);
        sl_string_free(xi);
        sl_excursion_free(contour);
        sl_map_free(back);
        sl_map_free(m);

        let bad = CString::new(r#"{"mode":"bf","i":[1,4],"k":[1,1]}"#).unwrap();
        let mut m2 = ptr::null_mut();
        assert_ne!(sl_map_insert(e, bad.as_ptr(), &mut m2), SlStatus::Ok);
        assert!(m2.is_null());
        sl_excursion_free(e);
    }
}

#[test]
fn sampling_is_reproducible() {
    unsafe {
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        let (mut wa, mut wb) = (0.0, 0.0);
        assert_eq!(sl_map_sample(50, 2, 9, 4, &mut a, &mut wa), SlStatus::Ok);
        assert_eq!(sl_map_sample(50, 2, 9, 4, &mut b, &mut wb), SlStatus::Ok);
        let (mut ja, mut jb) = (ptr::null_mut(), ptr::null_mut());
        sl_map_to_json(a, &mut ja);
        sl_map_to_json(b, &mut jb);
        assert_eq!(CStr::from_ptr(ja), CStr::from_ptr(jb));
        assert_eq!(wa, wb);
        assert!(wa > 0.0);
        sl_string_free(ja);
        sl_string_free(jb);
        sl_map_free(a);
        sl_map_free(b);
        let mut e = ptr::null_mut();
        assert_eq!(sl_excursion_sample(0, 1, 0, &mut e), SlStatus::Domain);
    }
}
