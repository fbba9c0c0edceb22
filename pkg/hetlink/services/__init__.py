"""services package – pure computations for every simulator module."""
