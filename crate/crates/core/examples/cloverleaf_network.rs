//! Builds the cloverleaf interchange and prints its topology.

use hetflow::network::{build_cloverleaf, CloverleafGeometry, RouteTable};

fn main() -> hetflow::Result<()> {
    let geometry = CloverleafGeometry::default();
    let net = build_cloverleaf(&geometry)?;
    println!(
        "{} segments, {} entry lanes, {} exits, {} detectors, {:.2} lane-km",
        net.segments.len(),
        net.entries.len(),
        net.exits.len(),
        net.detectors.len(),
        net.total_length_km()
    );
    for seg in &net.segments {
        let tapers = (0..seg.lane_count).filter(|&l| seg.is_taper(l)).count();
        println!(
            "  #{:<2} {:<22} {:>6.0} m  {} lane(s){}  -> {:?}",
            seg.id,
            seg.name,
            seg.length,
            seg.lane_count,
            if tapers > 0 { format!(", {tapers} tapering") } else { String::new() },
            net.next_segments(seg.id)
        );
    }

    let mut routes = RouteTable::new();
    let entry = net.entries[0];
    println!("routes from entry lane {} of segment {}:", entry.lane, net.segment(entry.segment).name);
    for exit in &net.exits {
        match routes.route(&net, entry.segment, exit.id) {
            Some(id) => {
                let names: Vec<&str> = routes.get(id).steps.iter().map(|s| net.segment(s.segment).name.as_str()).collect();
                println!("  {:<16} via {}", exit.name, names.join(" > "));
            }
            None => println!("  {:<16} unreachable", exit.name),
        }
    }
    Ok(())
}
