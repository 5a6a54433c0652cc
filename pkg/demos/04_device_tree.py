"""Reading device-tree sources.

Just enough of the DTS grammar to answer the two questions driver models
ask: which devices are here (compatible strings, for the chooser menu), and
where does a device live (the reg base/size pair).
"""

from pathlib import Path

from ssi import dtsi_find, list_compatibles

fixture = Path(__file__).resolve().parent.parent / "example_pinctrl" / "bcm283x.dtsi"

print("devices in", fixture.name)
for i, compat in enumerate(list_compatibles(fixture)):
    print(f"  {i} : {compat}")

base, size = dtsi_find(fixture, "brcm,bcm2835-gpio")
print(f"\nbrcm,bcm2835-gpio registers: base {base:#x}, size {size:#x}")
