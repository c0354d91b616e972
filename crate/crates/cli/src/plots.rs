//! gnuplot scripts. Each script reads CSVs from its own directory and
//! renders a PNG next to them (`cd <out> && gnuplot <script>`).

const PREAMBLE: &str = "set datafile separator ','\nset key autotitle columnhead\n";

fn terminal(output: &str, width: u32, height: u32) -> String {
    format!("{PREAMBLE}set terminal pngcairo size {width},{height}\nset output '{output}'\n")
}

pub fn basis(functions: usize) -> String {
    let last = functions + 1;
    format!(
        "{}set multiplot layout 1,2\n\
         set title 'Poincaré basis'\nset xlabel 't'\n\
         plot for [k=2:{last}] 'eigenfunctions.csv' using 1:k with lines\n\
         set title 'Eigenvalues'\nset xlabel 'm'\nset logscale y\n\
         plot 'eigenvalues.csv' using 1:2 with points pt 7 ps 0.6, \\\n     '' using 1:3 with lines\n\
         unset multiplot\n",
        terminal("basis.png", 1200, 500)
    )
}

pub fn quad(n: usize) -> String {
    format!(
        "{}set xlabel 't'\nset ylabel 'φ_{n}'\nset y2label 'weight, density'\n\
         set ytics nomirror\nset y2tics\nset xzeroaxis\n\
         plot 'quad_n{n}_curves.csv' using 1:3 with lines title 'φ_{n}', \\\n\
         \x20    'quad_n{n}_zeros.csv' using 2:(0) with points pt 6 ps 1.5 title 'zeros of φ_{n}', \\\n\
         \x20    'rule_n{n}.csv' using 1:(0) with points pt 7 title 'nodes', \\\n\
         \x20    'rule_n{n}.csv' using 1:2 axes x1y2 with impulses lw 2 title 'weights', \\\n\
         \x20    'quad_n{n}_curves.csv' using 1:2 axes x1y2 with lines dt 2 title 'density'\n",
        terminal(&format!("quad_n{n}.png"), 900, 600)
    )
}

pub fn wce_curve(with_reference: bool) -> String {
    let mut plot = String::from(
        "plot 'wce_curve.csv' using 1:2 with linespoints pt 7 ps 0.6 title 'wce(n)^2'",
    );
    if with_reference {
        plot.push_str(", \\\n     '' using 1:3 with lines dt 2 title 'closed form'");
    }
    format!(
        "{}set logscale xy\nset xlabel 'n'\nset ylabel 'squared worst-case error'\n{plot}\n",
        terminal("wce_curve.png", 800, 600)
    )
}

pub fn node_boxplots(n: usize) -> String {
    format!(
        "{}set title 'Node locations, n = {n}'\nset xlabel 'node index (one group per node)'\nset ylabel 't'\n\
         set style data boxplot\nset style boxplot nooutliers\n\
         pick(wanted, value) = (strcol(2) eq wanted ? value : NaN)\n\
         plot 'nodes_n{n}.csv' using (0.75):(pick('poincare', $4)):(0.25):3 title 'Poincaré', \\\n\
         \x20    '' using (1.0):(pick('gaussian', $4)):(0.25):3 title 'Gaussian', \\\n\
         \x20    '' using (1.25):(pick('lloyd', $4)):(0.25):3 title 'Lloyd'\n",
        terminal(&format!("nodes_n{n}.png"), 900, 600)
    )
}

pub fn ratio_boxplot() -> String {
    format!(
        "{}set title 'n w_i / ρ(x_i), n = 5'\nset xlabel 'node index'\n\
         set style data boxplot\nset yrange [0:*]\n\
         plot 'ratios_n5.csv' using (1):3:(0.5):2 title 'Poincaré', 1 with lines dt 2 notitle\n",
        terminal("ratios_n5.png", 800, 600)
    )
}

pub fn distance_scatter() -> String {
    format!(
        "{}set title 'Wasserstein distance to the density, n = 5'\n\
         set xlabel 'Lloyd'\nset ylabel 'Poincaré / Gaussian'\nset logscale xy\n\
         plot 'distances_n5.csv' using 4:2 with points pt 7 title 'Poincaré', \\\n\
         \x20    '' using 4:3 with points pt 6 title 'Gaussian', \\\n\
         \x20    x with lines dt 2 title 'equal'\n",
        terminal("distances_n5.png", 800, 600)
    )
}

pub fn random_batch(count: usize) -> String {
    format!(
        "{}set xlabel 't'\nset ylabel 'ρ'\nunset key\n\
         plot for [i=0:{}] sprintf('density_%03d.csv', i) using 1:2 with lines lw 0.5\n",
        terminal("densities.png", 900, 600),
        count.saturating_sub(1)
    )
}
