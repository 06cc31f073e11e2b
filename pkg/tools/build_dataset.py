"""Write the bundled synthetic evaluation records to src/cas/data/dataset/.

The records imitate crowdsourced household action sequences: a task
description, the hand-made action sequence with optional per-step notes,
and three overarching summaries (two written by people, one by a model).
They are synthetic and labeled as such in every file.

Step syntax below: ``verb arg [arg] | note`` (note may be omitted).
"""

from __future__ import annotations

import sys
from pathlib import Path

import yaml

OUT = Path(__file__).resolve().parents[1] / "src" / "cas" / "data" / "dataset"

RECORDS = [
    ("get_mail", "The mail carrier just dropped letters through the slot by the front entrance.",
     ["move_to entrance | go to the entrance", "grab mail | pick up the letters",
      "put_on mail table | leave them on the table"],
     ["Bring the mail from the entrance to the table.",
      "Pick up the letters at the door and put them on the table.",
      "Collect the mail from the entrance and place it on the table."]),
    ("get_mail", "A package was left at the front entrance and it is starting to rain.",
     ["move_to entrance | go to the entrance", "open front_door | open the door",
      "grab package | take the package", "close front_door | shut the door",
      "put_on package table | set it on the table"],
     ["Bring the package in from the door and put it on the table.",
      "Get the package before it gets wet and leave it on the table.",
      "Open the door, bring in the package, and set it on the table."]),
    ("answer_door", "Someone is knocking at the front door.",
     ["move_to front_door | walk to the door", "open front_door | open it",
      "say \"Hello, how can I help you?\" | greet the visitor"],
     ["Answer the front door and greet whoever is there.",
      "Go open the door and say hello.",
      "Open the front door and greet the visitor."]),
    ("answer_door", "The doorbell rings while your roommate is asleep; it is a neighbor returning a book.",
     ["move_to front_door", "open front_door | open the door", "say \"Hi, thanks for bringing it back.\" | thank the neighbor",
      "close front_door | close the door"],
     ["Get the door, thank the neighbor, and close it again.",
      "Answer the door quietly and thank the neighbor.",
      "Open the door, thank your neighbor, and close the door."]),
    ("phone_call", "The landline rings and the caller wants to talk to your roommate, who is upstairs.",
     ["grab phone | answer the phone", "move_to roommate | go up to the bedroom",
      "say \"Someone is on the phone for you.\" | let her know who is calling",
      "put_on phone table | leave the phone on the table for her"],
     ["Take the call up to my roommate and leave the phone on the table.",
      "Answer the phone, tell my roommate it is for her, and put it down on the table.",
      "Tell your roommate the call is for her and leave the phone on the table."]),
    ("phone_call", "The phone is ringing on the coffee table and your roommate asked you to bring it whenever it rings.",
     ["move_to coffee_table | go to the coffee table", "grab phone | pick up the phone",
      "give phone roommate | hand it to my roommate"],
     ["Bring the ringing phone to my roommate.",
      "Grab the phone from the coffee table and give it to my roommate.",
      "Take the phone from the coffee table to your roommate."]),
    ("serve_drink", "Your roommate is thirsty after coming home from a run.",
     ["move_to refrigerator | go to the fridge", "open refrigerator | open the fridge",
      "grab water_bottle | take out a bottle of water", "close refrigerator",
      "give water_bottle roommate | bring it to my roommate"],
     ["Get a bottle of water from the fridge for my roommate.",
      "Bring my roommate a cold water from the refrigerator.",
      "Take a water bottle from the fridge and give it to your roommate."]),
    ("serve_drink", "Guests are sitting in the living room and someone asked for a drink.",
     ["move_to kitchen_cabinets | go to the cabinets", "open kitchen_cabinets | open the cabinet",
      "grab cup | take a cup", "close kitchen_cabinets",
      "put_on cup coffee_table | put the cup on the coffee table"],
     ["Get a cup from the kitchen and put it on the coffee table.",
      "Bring a cup out to the coffee table for the guests.",
      "Take a cup from the cabinet and set it on the coffee table."]),
    ("make_coffee", "It is early morning and the household wants coffee.",
     ["move_to countertop | go to the counter", "turn_on coffee_maker | start the coffee maker"],
     ["Start the coffee maker.",
      "Go to the counter and turn on the coffee maker.",
      "Turn on the coffee maker on the counter."]),
    ("make_coffee", "Your roommate wants a cup of coffee brought to the desk.",
     ["move_to countertop", "turn_on coffee_maker | turn the coffee maker on",
      "move_to kitchen_cabinets", "open kitchen_cabinets | open the cabinet", "grab cup | get a mug",
      "put_on cup desk | bring the coffee to the desk", "move_to countertop",
      "turn_off coffee_maker | switch the machine off"],
     ["Make coffee and bring a cup to the desk, then turn off the machine.",
      "Brew coffee, take a mug to the desk, and switch off the coffee maker.",
      "Make a cup of coffee, bring it to the desk, and turn off the coffee maker."]),
    ("set_table", "Dinner is almost ready and the table needs to be set.",
     ["move_to kitchen_cabinets | go to the cabinets", "open kitchen_cabinets", "grab plate | take a plate",
      "grab cup | take a cup", "close kitchen_cabinets", "put_on plate table | put the plate on the table",
      "put_on cup table | put the cup on the table"],
     ["Set the table with a plate and a cup.",
      "Put a plate and a cup from the cabinet on the table.",
      "Take a plate and a cup from the cabinet and set them on the table."]),
    ("set_table", "Breakfast is being served at the coffee table today.",
     ["move_to kitchen_cabinets", "open kitchen_cabinets | open the cupboard", "grab plate | grab a plate",
      "put_on plate coffee_table | put it on the coffee table",
      "move_to kitchen_cabinets", "close kitchen_cabinets | close the cupboard"],
     ["Put a plate on the coffee table for breakfast.",
      "Bring a plate to the coffee table and close the cupboard.",
      "Take a plate from the cupboard to the coffee table."]),
    ("clear_table", "Dinner is over and there is a cup left on the table.",
     ["move_to table | go to the table", "grab cup | pick up the cup",
      "put_on cup countertop | put it on the counter"],
     ["Clear the cup off the table.",
      "Take the cup from the table to the counter.",
      "Move the cup from the table to the counter."]),
    ("clear_table", "The coffee table is cluttered with the remote and a book.",
     ["move_to coffee_table", "grab remote | pick up the remote",
      "put_on remote table | put it on the table", "move_to desk", "grab book | take the book",
      "put_on book bedside_table | put the book on the bedside table"],
     ["Tidy up the remote and the book.",
      "Put the remote on the table and the book on the bedside table.",
      "Move the remote to the table and the book to the bedside table."]),
    ("take_out_trash", "The kitchen trash bag is full.",
     ["move_to kitchen | go to the kitchen", "grab trash_bag | take the trash bag",
      "put_on trash_bag trash_can | throw it in the bin outside"],
     ["Take out the trash.",
      "Bring the full trash bag from the kitchen to the trash can.",
      "Take the trash bag from the kitchen to the trash can."]),
    ("take_out_trash", "It is trash night and the bin is beside the back door.",
     ["move_to kitchen", "grab trash_bag | grab the bag", "move_to back_door",
      "open back_door | open the back door", "put_on trash_bag trash_can | put it in the can",
      "move_to back_door", "close back_door | close the door"],
     ["Take the trash out the back door and close it behind you.",
      "Bring the trash bag out the back and shut the door.",
      "Take the trash bag out through the back door and close the door."]),
    ("water_plants", "The living room plant looks dry.",
     ["move_to garage | go to the garage", "grab watering_can | get the watering can",
      "move_to plant | go to the plant", "put_down watering_can | leave the can next to the plant"],
     ["Water the plant in the living room.",
      "Get the watering can from the garage and bring it to the plant.",
      "Bring the watering can to the living room plant."]),
    ("water_plants", "You are leaving for the weekend and the plant needs water.",
     ["grab watering_can | fetch the watering can", "move_to plant",
      "put_down watering_can | water the plant", "grab plant | pick up the plant",
      "put_on plant table | move it to the table by the window"],
     ["Water the plant and move it to the table.",
      "Give the plant water and put it on the table.",
      "Water the plant and place it on the table."]),
    ("vacuum", "There are crumbs all over the living room floor.",
     ["move_to garage | go get the vacuum", "grab vacuum", "move_to living_room | go to the living room",
      "turn_on vacuum | vacuum the floor", "turn_off vacuum | switch it off",
      "put_down vacuum"],
     ["Vacuum the living room.",
      "Bring the vacuum to the living room and clean up the crumbs.",
      "Get the vacuum from the garage and vacuum the living room."]),
    ("vacuum", "The bedroom carpet needs cleaning before guests arrive.",
     ["grab vacuum | get the vacuum", "move_to bedroom | go to the bedroom", "turn_on vacuum | vacuum",
      "turn_off vacuum", "move_to garage", "put_down vacuum | put the vacuum back"],
     ["Vacuum the bedroom and put the vacuum back.",
      "Clean the bedroom carpet with the vacuum, then return it to the garage.",
      "Vacuum the bedroom and return the vacuum to the garage."]),
    ("lights", "It is getting dark in the living room.",
     ["move_to living_room", "turn_on living_room_lamp | switch on the lamp"],
     ["Turn on the living room lamp.",
      "Switch on the light in the living room.",
      "Turn on the living room lamp."]),
    ("lights", "Everyone is going to bed.",
     ["move_to bedroom", "turn_on bedroom_lamp | turn on the bedroom light",
      "move_to bedside_table", "turn_on master_bedroom_lamp | turn on the lamp by the bed"],
     ["Turn on the bedroom lights.",
      "Switch on the bedroom lamp and the bedside lamp.",
      "Turn on the bedroom lamp and the master bedroom lamp."]),
    ("lock_up", "You are the last one going to bed and the cat is still outside.",
     ["move_to back_door | go to the back door", "open back_door | let the cat in",
      "close back_door | shut it again", "move_to front_door | check the front door"],
     ["Let the cat in through the back door and check the front door.",
      "Open the back door for the cat, close it, then check the front door.",
      "Let the cat in at the back door, close it, and check the front door."]),
    ("lock_up", "It is getting cold and the last guest is still out on the patio.",
     ["move_to back_door | go to the back door", "open back_door | let the guest in",
      "close back_door | close it behind them",
      "say \"The back door is closed.\" | let everyone know"],
     ["Let the last guest in, close the back door and tell everyone.",
      "Open the back door for the guest, then shut it and announce it.",
      "Let the last guest in through the back door, close it, and say it is closed."]),
    ("bring_medicine", "Your roommate has a headache and is lying in bed.",
     ["move_to bathroom | go to the bathroom", "grab medicine | get the pills",
      "move_to roommate", "give medicine roommate | give him the medicine"],
     ["Bring my roommate some medicine from the bathroom.",
      "Get the headache pills and give them to my roommate.",
      "Take the medicine from the bathroom to your roommate."]),
    ("bring_medicine", "Your roommate needs medicine and a glass of water.",
     ["grab medicine | get the medicine", "move_to refrigerator", "open refrigerator",
      "grab water_bottle | get some water", "close refrigerator",
      "give medicine roommate | give the pills", "give water_bottle roommate | and the water"],
     ["Bring my roommate medicine and water.",
      "Get the pills and a water from the fridge for my roommate.",
      "Give your roommate the medicine and a bottle of water."]),
    ("laundry", "The laundry basket in the bedroom is full.",
     ["move_to bedroom", "grab laundry_basket | pick up the basket",
      "move_to washing_machine | take it to the washer", "open washing_machine | open the washer",
      "put_on laundry_basket washing_machine | load the clothes", "close washing_machine | close it"],
     ["Put the laundry in the washing machine.",
      "Take the laundry basket to the washer and load it.",
      "Load the laundry from the bedroom into the washing machine."]),
    ("laundry", "There is a used towel in the bathroom.",
     ["move_to bathroom", "grab towel | take the towel", "move_to washing_machine",
      "open washing_machine", "put_on towel washing_machine | put it in the washer"],
     ["Put the bathroom towel in the washer.",
      "Take the towel to the washing machine.",
      "Put the used towel into the washing machine."]),
    ("groceries", "You just came back from shopping and the groceries are in the car.",
     ["move_to garage | go to the garage", "open car | open the car", "grab groceries | take the bags",
      "close car", "move_to kitchen", "put_on groceries countertop | put them on the counter"],
     ["Bring the groceries in from the car.",
      "Unload the groceries from the car onto the kitchen counter.",
      "Take the groceries from the car to the kitchen counter."]),
    ("groceries", "A snack is needed for the road before leaving in the car.",
     ["move_to kitchen_cabinets", "open kitchen_cabinets | open the cabinet", "grab snack | take a snack",
      "move_to car | go to the car", "open car", "put_on snack car | leave it in the car"],
     ["Put a snack in the car.",
      "Grab a snack from the cabinet and put it in the car.",
      "Take a snack from the cabinet to the car."]),
    ("find_keys", "You are about to leave but cannot find your keys.",
     ["find keys | look for the keys", "grab keys | pick them up",
      "move_to entrance | go to the door", "put_down keys | leave them by the door"],
     ["Find my keys and put them by the door.",
      "Look for the keys and leave them at the entrance.",
      "Find the keys and bring them to the entrance."]),
    ("find_keys", "Your roommate asks where their glasses are.",
     ["find glasses | look for the glasses", "grab glasses", "give glasses roommate | give them to my roommate"],
     ["Find my roommate's glasses.",
      "Look for the glasses and hand them to my roommate.",
      "Find the glasses and give them to your roommate."]),
    ("tidy_living_room", "Guests are coming and the living room is messy.",
     ["move_to coffee_table", "grab remote | pick up the remote",
      "open living_room_cabinets | open the cabinet", "put_on remote living_room_cabinets | put it away",
      "close living_room_cabinets | close the cabinet"],
     ["Tidy the living room before the guests come.",
      "Put the remote away in the living room cabinet.",
      "Put the remote in the living room cabinet and close it."]),
    ("tidy_living_room", "An umbrella was left dripping at the entrance.",
     ["move_to entrance", "grab umbrella | pick up the umbrella", "move_to garage | take it to the garage",
      "put_down umbrella | leave it there to dry"],
     ["Move the umbrella to the garage.",
      "Take the wet umbrella from the entrance to the garage.",
      "Put the umbrella from the entrance in the garage to dry."]),
    ("wake_roommate", "Your roommate asked to be woken up at seven.",
     ["move_to bedroom | go to the bedroom", "turn_on bedroom_lamp | turn on the light",
      "say \"Good morning, it is seven o'clock.\" | wake him up"],
     ["Wake up my roommate at seven.",
      "Go to the bedroom, turn on the light, and wake my roommate.",
      "Turn on the bedroom light and tell your roommate it is seven."]),
    ("wake_roommate", "Your roommate overslept and has a meeting.",
     ["move_to roommate", "say \"You have a meeting soon.\" | tell him about the meeting",
      "move_to kitchen_cabinets", "open kitchen_cabinets", "grab cup | get a cup",
      "give cup roommate | bring him a drink"],
     ["Wake my roommate and bring him a cup.",
      "Tell my roommate about the meeting and give him a cup.",
      "Remind your roommate of the meeting and hand them a cup."]),
    ("check_time", "You want to know what time it is but the clock is in the hallway.",
     ["move_to hallway | go to the hallway", "look_at clock | check the clock",
      "say \"It is almost noon.\" | tell me the time"],
     ["Check the time on the hallway clock.",
      "Look at the clock in the hallway and tell me the time.",
      "Check the hallway clock and say the time."]),
    ("check_time", "The hallway clock stopped and needs to go on the desk for repair.",
     ["move_to hallway", "grab clock | take the clock down", "put_on clock desk | put it on the desk"],
     ["Move the broken clock to the desk.",
      "Take the hallway clock to the desk so it can be fixed.",
      "Move the clock from the hallway to the desk."]),
    ("leave_house", "You are heading out and it looks like rain.",
     ["move_to entrance", "grab umbrella | take the umbrella", "grab keys | grab my keys",
      "open front_door | open the door", "close front_door | close it behind me"],
     ["Get the umbrella and keys and head out the front door.",
      "Take my umbrella and keys and leave through the front door.",
      "Take the umbrella and the keys and go out the front door."]),
    ("leave_house", "Before leaving, all lights in the living room and bedroom should be off.",
     ["move_to living_room", "turn_on living_room_lamp | check the lamp works",
      "turn_off living_room_lamp | turn it off", "move_to garage", "open car | get into the car"],
     ["Check the living room lamp, turn it off, and go to the car.",
      "Test the lamp, switch it off, and open the car.",
      "Turn the living room lamp on and off, then open the car in the garage."]),
]


def parse_step(text: str) -> dict:
    action, _, note = text.partition("|")
    verb, *args = _split(action.strip())
    line = f"[{verb}] " + " ".join(f"<{a}> (1)" for a in args)
    return {"action": line.strip(), "nl": note.strip() or None}


def _split(text: str) -> list[str]:
    out, buf, quoted = [], "", False
    for ch in text:
        if ch == '"':
            quoted = not quoted
            buf += ch
        elif ch == " " and not quoted:
            if buf:
                out.append(buf)
            buf = ""
        else:
            buf += ch
    if buf:
        out.append(buf)
    return out


def main(out: Path = OUT) -> int:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("*.yaml"):
        old.unlink()
    counters: dict[str, int] = {}
    for i, (category, task, steps, summaries) in enumerate(RECORDS, start=1):
        counters[category] = counters.get(category, 0) + 1
        rid = f"r{i:02d}_{category}_{counters[category]}"
        doc = {
            "id": rid,
            "synthetic": True,
            "category": category,
            "problem": "home",
            "task": task,
            "steps": [parse_step(s) for s in steps],
            "summaries": [
                {"source": "human", "text": summaries[0]},
                {"source": "human", "text": summaries[1]},
                {"source": "model", "text": summaries[2]},
            ],
        }
        text = "# SYNTHETIC record: written for this package, not taken from any published dataset.\n"
        text += yaml.safe_dump(doc, sort_keys=False, allow_unicode=True, width=100)
        (out / f"{rid}.yaml").write_text(text, encoding="utf-8", newline="")
    print(f"wrote {len(RECORDS)} records to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:2]))
