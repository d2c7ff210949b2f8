############################################################
# CHANGELOG:
# - [2026-10-02] agt101 {author=agent} {reason: logger unique du dépôt livrefine, sortie sur stderr}
# - Impact: stdout reste réservé aux rapports JSON de la CLI (déterminisme octet par octet)
# - Tests: tests/test_config.py vérifie le niveau lu depuis LIVREFINE_LOG_LEVEL
# - Notes: même format que l'ancien logger applicatif
# - [2026-10-17] agt129 {author=agent} {reason: un rechargement empilait les handlers console}
# - Impact: le handler console est nommé et remplacé à chaque import; les handlers posés par pytest restent
# - Tests: tests/test_config.py::test_reload_keeps_single_console_handler
############################################################
import logging
import os
import sys

CONSOLE_HANDLER = "livrefine-console"

# Config du logger unique pour le dépôt
logger = logging.getLogger("livrefine")
logger.setLevel(os.getenv("LIVREFINE_LOG_LEVEL", "INFO").upper())
console_handler = logging.StreamHandler(sys.stderr)
console_handler.set_name(CONSOLE_HANDLER)
console_handler.setLevel(logging.DEBUG)
formatter = logging.Formatter("%(asctime)s [%(levelname)s] [%(filename)s] [%(funcName)s] %(message)s")
console_handler.setFormatter(formatter)
for old in [h for h in logger.handlers if h.get_name() == CONSOLE_HANDLER]:
    logger.removeHandler(old)
logger.addHandler(console_handler)
logger.propagate = False
