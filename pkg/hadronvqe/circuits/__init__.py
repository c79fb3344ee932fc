"""Circuit representation, ansatz families and circuit reduction."""
