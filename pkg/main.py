"""
main.py
จุดเริ่มรันโปรเจกต์ FARC: THz Reflection Coefficient Toolkit

ค่าตั้งต้นอ่านจาก config.yaml (ถ้ามี) คำสั่งย่อยทั้งหมดอยู่ใน src/cli/cli.py
ตัวอย่าง:
    python main.py materials
    python main.py eval --model fresnel --material glass --theta 0 --freq 260
    python main.py fit samples.csv --material glass --seed 7

อัปเดตล่าสุด: v2.0.0
"""

import sys

from src.cli.cli import main

if __name__ == "__main__":
    sys.exit(main())
