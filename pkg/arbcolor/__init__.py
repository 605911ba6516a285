# Arboricity-dependent distributed coloring: simulator and algorithm library
