//! Gnuplot command files referencing the CSVs a task wrote. Plain text
//! out, no plotting dependency in: `gnuplot <stem>.gp` renders a PNG next
//! to the data.

fn preamble(stem: &str, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{stem}.png'\n\
         set title '{title}'\n\
         set key autotitle columnhead\n\
         set grid\n"
    )
}

pub fn spectrum(stem: &str) -> String {
    let mut s = preamble(stem, "Eigenvalues of H(g)");
    s.push_str(&format!(
        "set xlabel 'level index'\n\
         set ylabel 'energy'\n\
         plot '{stem}.csv' using 2:3 with points pt 7 title 'spectrum'\n"
    ));
    s
}

pub fn gap_sweep(stem: &str) -> String {
    let mut s = preamble(stem, "Ground-state gap along the coupling ramp");
    s.push_str(&format!(
        "set xlabel 'g'\n\
         set ylabel 'gap'\n\
         plot '{stem}.csv' using 1:2 with lines lw 2 title 'gap(g)'\n"
    ));
    s
}

pub fn sweep(stem: &str) -> String {
    let mut s = preamble(stem, "Optimized vs linear-ramp infidelity");
    s.push_str(&format!(
        "set xlabel 'T'\n\
         set ylabel 'R'\n\
         set logscale x\n\
         plot '{stem}.csv' using 1:4 with linespoints lw 2 title 'optimized', \\\n\
              '{stem}.csv' using 1:5 with linespoints lw 2 title 'linear ramp'\n"
    ));
    s
}

pub fn landscape(stem: &str) -> String {
    let mut s = preamble(stem, "Fidelity over the (a1, a2) plane");
    s.push_str(&format!(
        "set xlabel 'a1'\n\
         set ylabel 'a2'\n\
         set view map\n\
         splot '{stem}.csv' using 1:2:3 with points pt 5 ps 1.5 palette notitle\n"
    ));
    s
}

pub fn qsl(stem: &str) -> String {
    let mut s = preamble(stem, "Horizon over quantum-speed-limit time");
    s.push_str(&format!(
        "set xlabel 'T'\n\
         set ylabel 'T / T_QSL'\n\
         set logscale x\n\
         plot '{stem}.csv' using 1:5 with linespoints lw 2 title 'efficiency'\n"
    ));
    s
}
