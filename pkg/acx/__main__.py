# -*- coding: utf-8 -*-
from acx.cli import main

main()
