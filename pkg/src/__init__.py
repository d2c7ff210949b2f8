############################################################
# CHANGELOG:
# - [2026-10-02] agt100 {author=agent} {reason: package livrefine (automates, vivacité, simulations, ESDS)}
# - Impact: permet `python -m src.cli` et `python -m src.esds_scheduler`
# - Tests: tests/ importe les modules via `src.` sans configuration supplémentaire
# - Notes: aucun import au chargement du package
############################################################
"""Package livrefine: raffinements vivaces d'automates E/S et étude de cas ESDS."""
