// Letter-tile keyboard state. Each tile is usable once per its multiplicity:
// pressing consumes it, backspace restores the most recent press. The server
// re-validates spellability regardless; this just makes the input honest.

export type Tile = { letter: string; used: boolean };

export class TileKeyboard {
  tiles: Tile[];
  private pressed: number[] = [];

  constructor(letters: string[]) {
    this.tiles = letters.map((letter) => ({ letter, used: false }));
  }

  press(index: number): boolean {
    const tile = this.tiles[index];
    if (!tile || tile.used) return false;
    tile.used = true;
    this.pressed.push(index);
    return true;
  }

  backspace(): boolean {
    const index = this.pressed.pop();
    if (index === undefined) return false;
    this.tiles[index].used = false;
    return true;
  }

  clear(): void {
    while (this.backspace()) {
      // restore everything
    }
  }

  value(): string {
    return this.pressed.map((i) => this.tiles[i].letter).join("");
  }

  remaining(): number {
    return this.tiles.filter((t) => !t.used).length;
  }
}
