from rectiforge import RectiForge, load_params

params = load_params()
model3 = RectiForge("doubler", params)

for pin in [-20, -10, 0]:

    model3.sweep("r_load", [10e3, 12e3, 14e3, 16e3, 18e3], {"freq": 95e6, "pin": pin})

    model3.save(f"run_loads_{pin}dBm")  # (1)!
