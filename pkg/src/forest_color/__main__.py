from forest_color.cli import run

run()
