use impedance_core::domain::*;
use impedance_core::greens::*;
use std::sync::Arc;

fn main() {
    let d = Domain::disk(1.0).unwrap();
    let spec = PotentialSpec::gaussian(1.0, 0.25);
    let breaks = spec.radial_breaks(d);
    let grid = build_volume_grid_split(d, 20, 32, &breaks).unwrap();
    let boundary = build_boundary_grid(d, 48).unwrap();
    let v = sample_potential(&spec, &grid).unwrap();
    let g0 = Arc::new(DomainGreen::free(&grid, &boundary, 1.0, std::f64::consts::FRAC_PI_2, v.support_radius).unwrap());
    let (g2, corr) = green_change_potential(&g0, &v).unwrap();
    println!("resid {} cond {}", corr.residual, corr.condition);
    let x = [0.31, 0.12];
    let y = [-0.17, 0.4];
    let gxy = g2.eval(x, y).unwrap();
    let gyx = g2.eval(y, x).unwrap();
    println!("gxy {gxy} gyx {gyx} diff {}", (gxy - gyx).norm());
    // also check the free part symmetry trivially and vb consistency:
    // boundary column vs eval at boundary point
    let b = 5usize;
    let pb = boundary.points[b];
    let node = 3usize; // some supp node
    let via_vb = g2.vb[[node, b]];
    let via_eval = g2.eval(grid.nodes[node], pb).unwrap();
    println!("vb {via_vb} eval {via_eval} diff {}", (via_vb - via_eval).norm());
}
