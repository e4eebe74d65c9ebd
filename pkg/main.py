#!/usr/bin/env python3
"""
MCS Model CLI

Distances between labeled graphs through maximum common subelement
models, axiom checking for finite models, the metric-space model
constructor and exact graph edit distance.

    python main.py dist --kind I --metric dc k3.json p3.json --alpha uniform
"""

import sys

from mcsmodel.cli import main

if __name__ == "__main__":
    sys.exit(main())
