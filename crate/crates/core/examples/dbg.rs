use std::time::Instant;
use witnessdecomp::budget::Budget;
use witnessdecomp::exactalg::{buchberger, ideal_dimension};
use witnessdecomp::parse::parse_system;
use std::time::Duration;

fn cyclic(n: usize) -> String {
    let vars: Vec<String> = (0..n).map(|i| format!("x{}", i)).collect();
    let mut out = format!("vars {};\n", vars.join(","));
    for k in 1..n {
        let mut terms = Vec::new();
        for i in 0..n {
            let prod: Vec<String> = (0..k).map(|j| vars[(i + j) % n].clone()).collect();
            terms.push(prod.join("*"));
        }
        out.push_str(&format!("{};\n", terms.join(" + ")));
    }
    out.push_str(&format!("{} - 1;\n", vars.join("*")));
    out
}

fn time_dim(name: &str, src: &str) {
    let parsed = parse_system(src).unwrap();
    let exact = parsed.exact.expect("rational");
    let t0 = Instant::now();
    match buchberger(&exact.polys, &Budget::with_timeout(Duration::from_secs(100))) {
        Ok(gb) => println!("{}: dim={} gens={} in {:.2?}", name, ideal_dimension(&gb), gb.gens().len(), t0.elapsed()),
        Err(e) => println!("{}: ERROR {} after {:.2?}", name, e, t0.elapsed()),
    }
}

fn main() {
    time_dim("sphere_union", "vars x,y,z;
(y-x^2)*(x^2+y^2+z^2-1)*(x-1/2);
(z-x^3)*(x^2+y^2+z^2-1)*(y-1/2);
(y-x^2)*(z-x^3)*(x^2+y^2+z^2-1)*(z-1/2);");
    time_dim("cusp_line_overdet", "vars x,y; x*(y^2-x^3)*(x-1); x*(3*x+y)*(y^2-x^3)*(y-2); x*(y^2-x^3)*(x^2-y);");
    time_dim("cubic_two_lines", "vars x,y,z; (x-1)*((x^3+z)+(x^2-y)); (x^3+z)*(x^2-y); (x^3+z)*(x^2-1);");
    time_dim("two_surfaces", "vars x,y,z; (x^3+z)*(x^2-y);");
    time_dim("three_lines", "vars x,y; (y-x)*(y-2*x)*(y-3*x);");
    time_dim("circle_line", "vars x,y; (x^2+y^2-5)*(x-2*y-3);");
    time_dim("cyclic6", &cyclic(6));
    time_dim("cyclic7", &cyclic(7));
}
