//! Arithmetic of classes m + nT, where T is the class of an open ray.

use grothlin::euler::{g_class, GClass};
use grothlin::formula::DefSet;

fn main() {
    let t = GClass::T;
    println!("T * T     = {}", t * t);
    println!("T * T + T = {}", t * t + t);

    let point = g_class(&DefSet::parse_vars("x = 0", &["x"]).unwrap());
    let ray = g_class(&DefSet::parse_vars("0 < x", &["x"]).unwrap());
    let interval = g_class(&DefSet::parse_vars("0 < x & x < 1", &["x"]).unwrap());
    let line = g_class(&DefSet::universe(1));
    println!("[point] = {point}, [ray] = {ray}, [interval] = {interval}, [line] = {line}");
    // the line splits as ray, point, ray
    assert_eq!(line, ray + point + ray);

    let quadrant = g_class(&DefSet::parse_vars("0 < x & 0 < y", &["x", "y"]).unwrap());
    println!("[quadrant] = {quadrant} = [ray]^2 = {}", ray * ray);

    for c in [interval, ray, line, quadrant] {
        println!("{c:>8}: psi_g = {:>2}, psi_b = {:>2}", c.psi_g(), c.psi_b());
    }
    let parsed: GClass = "1 + 2*T".parse().unwrap();
    assert_eq!(parsed, line);
}
