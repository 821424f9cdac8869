use nalgebra::{SVector, Vector2};
use wulffc::integrand::ConvexIntegrand;
use wulffc::sphere::{UnitVec, UnitVec2};
use wulffc::wulff::build_wulff;

fn main() {
    let square = ConvexIntegrand::support(vec![
        SVector::<f64, 2>::new(1.0, 1.0),
        SVector::<f64, 2>::new(-1.0, 1.0),
        SVector::<f64, 2>::new(-1.0, -1.0),
        SVector::<f64, 2>::new(1.0, -1.0),
    ])
    .unwrap();
    let w = build_wulff(&square, 720).unwrap();
    println!("square vertices: {}", w.vertices().len());
    for v in w.vertices().iter().take(12) {
        println!("  {:.12} {:.12}", v.x, v.y);
    }
    let p = UnitVec::normalize(Vector2::new(1.0, 1.0)).unwrap();
    let hit = w.ray_boundary_point(&p);
    println!("hit: {:?}, depth {:.3e}", hit, w.depth(&hit));

    let hexagon: Vec<SVector<f64, 2>> = (0..6)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 6.0;
            SVector::<f64, 2>::new(a.cos(), a.sin())
        })
        .collect();
    let g = ConvexIntegrand::support(hexagon).unwrap();
    let w = build_wulff(&g, 720).unwrap();
    println!("hex vertices: {}", w.vertices().len());
    let hit = w.ray_boundary_point(&UnitVec2::from_angle(0.0));
    println!("hex hit: {:?} depth {:.3e}", hit, w.depth(&hit));
    let mut prev = w.vertices()[w.vertices().len()-1];
    let mut min_edge = f64::INFINITY;
    for v in w.vertices() { min_edge = min_edge.min((v - prev).norm()); prev = *v; }
    println!("min edge length {:.3e}", min_edge);
}
